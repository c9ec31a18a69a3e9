// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agcv/contracts/contract.hpp"
#include "agcv/sos/bisect.hpp"

namespace agcv {

/// Variables the input multipliers of the barrier condition range over.
enum class InputScope {
    /// state and inputs for local_feasibility, the parent's outputs for the
    /// scalar programs
    Declared,
    /// always the parent's outputs
    Inputs,
    /// always state and inputs
    Joint,
};

std::string to_string(InputScope s);
InputScope input_scope_from_string(const std::string& s);

struct SynthesisConfig {
    double epsilon = 1e-4;
    /// class-K gain; a subsystem's own gain takes precedence
    double gain_a = 1.0;
    /// 0 picks the degree of the safe region polynomials
    int h_degree = 0;
    /// -1 applies the degree rule; otherwise used for every multiplier
    int sigma_degree = -1;
    /// added to h and multiplier degrees
    int degree_boost = 0;
    double bisection_tol = 1e-3;
    std::optional<double> delta_max;
    std::optional<double> zeta_max;
    /// restrict the barrier condition to the working safe region
    bool localize_cbf = true;
    InputScope sigma_input_scope = InputScope::Declared;
    bool normalize = true;
    sdp::SolverSettings solver = sdp::SolverSettings::from_environment();
    sos::ExtractSettings extract;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
    [[nodiscard]] double gain_for(const Subsystem& s) const { return s.gain_a.value_or(gain_a); }
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> snapshot() const;
};

struct LocalResult {
    sdp::Status status = sdp::Status::NumericalFailure;
    std::optional<Contract> contract;
    [[nodiscard]] bool feasible() const { return contract.has_value(); }
};

struct ScalarSearch {
    bool feasible = false;
    double value = 0.0;
    std::optional<Contract> contract;
    sos::BisectionOutcome outcome = sos::BisectionOutcome::Infeasible;
    double lo = 0.0;
    double hi = 0.0;
    int probes = 0;
    std::string reason;
};

/// Solves the three barrier conditions at fixed (delta, zeta) with the
/// working safe region {q >= safe_offset}.
LocalResult local_feasibility(const Subsystem& s, double delta, double zeta, const SynthesisConfig& cfg,
                              double safe_offset = 0.0);

/// Smallest feasible delta at the given zeta (largest assumption set).
ScalarSearch maximal_internal_input_set(const Subsystem& s, double zeta, const SynthesisConfig& cfg,
                                        double safe_offset = 0.0);

/// Largest feasible zeta at the given delta (smallest guarantee set).
ScalarSearch minimal_safe_region(const Subsystem& s, double delta, const SynthesisConfig& cfg,
                                 double safe_offset = 0.0);

/// A child's assumption on this subsystem's outputs: {y : bounds(y) >= delta}.
struct ChildAssumption {
    SubsystemId child = 0;
    PolynomialVector bounds;
    double delta = 0.0;
};

/// Smallest offset z' >= current_offset with {q >= z'} inside every child's
/// assumption pulled back through the output map. No children leaves the
/// offset unchanged. Infeasible when the shrunk region would be empty.
ScalarSearch update_safe_region(const Subsystem& s, const std::vector<ChildAssumption>& children,
                                double current_offset, const SynthesisConfig& cfg);

/// 2 * max over parents of max d (0 without parents), unless overridden.
double delta_upper_bound(const Subsystem& s, const SynthesisConfig& cfg);
/// min over sampled initial-set points of min_c q_c - safe_offset, unless overridden.
double zeta_upper_bound(const Subsystem& s, double safe_offset, const SynthesisConfig& cfg);

} // namespace agcv
