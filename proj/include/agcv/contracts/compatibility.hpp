// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agcv/contracts/contract.hpp"

namespace agcv {

struct CompatibilitySettings {
    /// added to every multiplier degree
    int degree_boost = 0;
    /// fall back to the parent's guarantee region when the barrier fails
    bool region_fallback = true;
    sdp::SolverSettings solver = sdp::SolverSettings::from_environment();
    sos::ExtractSettings extract;
};

struct CompatibilityResult {
    bool established = false;
    std::optional<EdgeEvidence> evidence;
    /// why evidence is missing ("not established" is never "disproved")
    std::string failure;
};

/// S-procedure check that {h_parent >= 0} implies d^child_parent(o(x)) >= delta.
CompatibilityResult check_compatibility(const Subsystem& parent, const Contract& parent_contract,
                                        const Subsystem& child, double child_delta,
                                        const CompatibilitySettings& settings = {});

/// Same for every parent of `child`; stops at the first failing edge.
std::vector<CompatibilityResult> check_compatibility(const Interconnection& sys,
                                                     const std::map<SubsystemId, Contract>& parent_contracts,
                                                     const Subsystem& child, double child_delta,
                                                     const CompatibilitySettings& settings = {});

/// For an exogenous source: {set >= 0} implies d^child_source >= delta.
/// Coordinates follow the child's normalization of the source variables.
CompatibilityResult check_source_compatibility(const Source& source, const Subsystem& child, double child_delta,
                                               const Normalization& child_normalization,
                                               const CompatibilitySettings& settings = {});

/// d^child_parent composed with the parent's output map, over the parent state.
PolynomialVector composed_bounds(const Subsystem& parent, const Subsystem& child);

} // namespace agcv
