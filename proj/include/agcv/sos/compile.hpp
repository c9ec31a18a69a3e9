// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "agcv/sdp/solver.hpp"
#include "agcv/sos/program.hpp"

namespace agcv::sos {

/// Where every slot and every constraint Gram matrix lives in the SDP.
struct BackMap {
    std::map<SlotRef, std::size_t> slot_var;
    struct ConstraintGram {
        std::vector<Monomial> basis;
        std::size_t block = 0;
        /// SDP variable of each upper-triangle entry, row-major.
        std::vector<std::size_t> vars;
        std::size_t equalities = 0;
    };
    std::vector<ConstraintGram> constraints;
    /// Block index of each Sos unknown (npos for free unknowns).
    std::vector<std::size_t> unknown_block;
};

struct Compiled {
    sdp::SdpProblem problem;
    BackMap map;
};

/// One PSD block per Sos unknown, per nonnegative scalar and per constraint,
/// plus one coefficient-matching equality per monomial of each constraint.
Compiled compile(const SosProgram& program);

struct GramEvidence {
    std::string label;
    std::vector<Monomial> basis;
    Eigen::MatrixXd gram;
    double residual = 0.0;
    double min_eigenvalue = 0.0;
};

struct Extraction {
    std::map<std::string, Polynomial> polynomials;
    std::map<std::string, double> scalars;
    std::map<SlotRef, double> slot_values;
    std::vector<GramEvidence> constraints;
    /// Gram matrix of every Sos-kind unknown, labelled by the unknown's name.
    std::vector<GramEvidence> unknown_grams;
    double max_residual = 0.0;
};

struct ExtractSettings {
    double residual_tol = 1e-6;
    double psd_tol = 1e-7;
};

struct ProgramResult {
    sdp::Status status = sdp::Status::NumericalFailure;
    Extraction extraction;
    int iterations = 0;

    [[nodiscard]] bool feasible() const {
        return status == sdp::Status::Optimal || status == sdp::Status::Feasible;
    }
};

/// Rebuilds every unknown and every constraint Gram matrix from a solution.
/// Returns NumericalFailure when a coefficient identity misses residual_tol or
/// a Gram matrix is below -psd_tol.
ProgramResult extract(const SosProgram& program, const Compiled& compiled, const sdp::SdpSolution& solution,
                      const ExtractSettings& settings = {});

/// compile + solve + extract.
ProgramResult solve(const SosProgram& program, const sdp::SolverSettings& solver = sdp::SolverSettings::from_environment(),
                    const ExtractSettings& settings = {});

/// Constraint-by-constraint listing of bases, block sizes and equality counts.
std::string dump(const SosProgram& program, const Compiled& compiled, const VariableTable& vars);

/// Gram form z^T Q z expanded over a basis.
Polynomial expand_gram(const std::vector<Monomial>& basis, const Eigen::MatrixXd& gram);

} // namespace agcv::sos
