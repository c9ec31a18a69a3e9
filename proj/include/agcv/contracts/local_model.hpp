// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "agcv/contracts/interconnection.hpp"
#include "agcv/contracts/normalization.hpp"

namespace agcv {

/// State axes from the safe region, input axes from each group's bounds.
/// With `enabled` false every axis is the identity.
Normalization subsystem_normalization(const Subsystem& s, bool enabled = true);

/// A subsystem rewritten in normalized coordinates.
struct LocalModel {
    std::vector<VarId> state;
    std::vector<VarId> inputs;
    PolynomialVector dynamics;
    PolynomialVector initial_set;
    PolynomialVector safe_region;
    struct Group {
        SubsystemId parent = 0;
        std::vector<VarId> vars;
        PolynomialVector bounds;
    };
    std::vector<Group> groups;
};

LocalModel local_model(const Subsystem& s, const Normalization& n);

/// Rounds up to the next even number; negative values become 0.
unsigned even_degree(int d);

/// Degree rule for multipliers: max(0, constraint - multiplicand), made even.
unsigned multiplier_degree(int constraint_degree, int multiplicand_degree);

int max_degree(const PolynomialVector& p);

} // namespace agcv
