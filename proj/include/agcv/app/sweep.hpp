// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agcv/synthesis/synthesis.hpp"

namespace agcv::app {

enum class SweepParameter { Delta, Zeta, GainA, Degree };

std::string to_string(SweepParameter p);
SweepParameter sweep_parameter_from_string(const std::string& s);

/// Parses "v1,v2,..." or "lo:step:hi" (inclusive, tolerant to rounding).
/// Throws std::invalid_argument on malformed or empty ranges.
std::vector<double> parse_range(const std::string& text);

struct SweepRow {
    double parameter = 0.0;
    std::optional<double> delta;
    std::optional<double> zeta;
    bool feasible = false;
};

struct SweepResult {
    SweepParameter parameter = SweepParameter::Zeta;
    SubsystemId subsystem = 0;
    std::vector<SweepRow> rows;
    /// largest ordering violation among consecutive feasible rows
    double max_violation = 0.0;
    /// the expected ordering, or "none" for gain_a
    std::string ordering;
    bool monotone = true;
};

/// Reruns synthesis on one subsystem (safe offset 0) at every grid point:
/// - zeta:   delta* at zeta, then zeta* at delta*; delta* must not decrease
/// - delta:  zeta* at delta; zeta* must not decrease
/// - gain_a: delta* at zeta = 0, then zeta*; no ordering asserted
/// - degree: h degree set to the value; delta* must not increase
/// With `relative`, delta grid values are offsets from delta*(zeta = 0).
/// Violations larger than `slack` clear `monotone`.
SweepResult sweep(const Subsystem& s, SweepParameter parameter, std::vector<double> values,
                  const SynthesisConfig& cfg, bool relative, double slack);

/// CSV with header "parameter,delta_star,zeta_star,verdict" and a final
/// "# monotone,<true|false>,<ordering>,<max violation>" summary row.
std::string write_sweep_csv(const SweepResult& result);

} // namespace agcv::app
