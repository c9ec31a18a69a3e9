// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "agcv/sos/compile.hpp"

namespace agcv::sos {

enum class Direction {
    /// feasible for large values; find the smallest feasible one
    MinimizeFindSmallestFeasible,
    /// feasible for small values; find the largest feasible one
    MaximizeFindLargestFeasible,
};

enum class BisectionOutcome { Found, Infeasible, Inconsistent };

struct Probe {
    double value = 0.0;
    bool feasible = false;
};

struct BisectionResult {
    BisectionOutcome outcome = BisectionOutcome::Infeasible;
    double value = 0.0;
    /// Bracket left when the loop stopped: feasible end and infeasible end.
    double feasible_end = 0.0;
    double infeasible_end = 0.0;
    ProgramResult certificate;
    std::vector<Probe> probes;
    int iterations = 0;
};

using FeasibilityProbe = std::function<ProgramResult(double)>;

/// ceil(log2((hi - lo) / tol)), and 0 for a degenerate bracket.
int bisection_steps(double lo, double hi, double tol);

/// Bisection on a scalar whose feasibility is monotone in the given direction.
/// Endpoints are checked first: the infeasible-side endpoint being feasible
/// returns it directly; the feasible-side endpoint being infeasible yields
/// Infeasible. Feasible at the wrong end but not the right one is reported as
/// Inconsistent.
BisectionResult bisect_scalar(const FeasibilityProbe& probe, Direction direction, double lo, double hi, double tol);

/// Template form: builds a program per value and solves it.
BisectionResult bisect_scalar(const std::function<SosProgram(double)>& program_template, Direction direction,
                              double lo, double hi, double tol,
                              const sdp::SolverSettings& solver = sdp::SolverSettings::from_environment());

} // namespace agcv::sos
