// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "agcv/sdp/problem.hpp"

namespace agcv::sdp {

enum class Status { Optimal, Feasible, Infeasible, Unbounded, NumericalFailure };

std::string_view to_string(Status s);

struct SolverSettings {
    double psd_tol = 1e-7;
    double gap_tol = 1e-8;
    double feas_tol = 1e-8;
    int max_iterations = 200;
    Eigen::Index max_dimension = 200;
    /// Per-iteration progress on stderr.
    bool verbose = false;

    /// Defaults with max_dimension taken from AGCV_MAX_SDP_DIM when set.
    static SolverSettings from_environment();
};

struct SdpSolution {
    Status status = Status::NumericalFailure;
    Eigen::VectorXd y;
    std::vector<Eigen::MatrixXd> block_matrices;
    double objective = 0.0;
    /// Duality gap <s, z> of the final iterate, divided by max(1, |objective|).
    double duality_gap = 0.0;
    /// Smallest eigenvalue over the realized blocks (+inf with no blocks).
    double min_block_eigenvalue = 0.0;
    double equality_residual = 0.0;
    int iterations = 0;
};

/// Homogeneous self-dual interior point method with Nesterov-Todd scaling and
/// a Mehrotra predictor-corrector. Equalities are eliminated beforehand by a
/// null-space parameterization. Throws std::length_error when the total block
/// dimension exceeds settings.max_dimension.
SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings = {});

} // namespace agcv::sdp
