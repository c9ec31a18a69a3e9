// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "agcv/poly/polynomial.hpp"
#include "agcv/poly/variables.hpp"

namespace agcv {

using SubsystemId = int;

/// Internal input received from one parent: the parent's output variables as
/// they appear in this subsystem's dynamics, and the bound polynomials d
/// defining the assumption {y : d(y) >= delta}.
struct InputGroup {
    SubsystemId parent = 0;
    std::vector<VarId> vars;
    PolynomialVector bounds;
};

struct Subsystem {
    SubsystemId id = 0;
    std::vector<VarId> state;
    std::vector<VarId> outputs;
    PolynomialVector output_map;
    PolynomialVector dynamics;
    PolynomialVector initial_set;
    PolynomialVector safe_region;
    std::vector<InputGroup> inputs;
    std::optional<double> gain_a;

    [[nodiscard]] std::vector<VarId> input_vars() const;
    [[nodiscard]] const InputGroup* input_from(SubsystemId parent) const;
};

/// Exogenous signal entering the graph, e.g. a leader's reference velocity.
/// Its outputs range over {y : set(y) >= 0}; `value` is used in simulation.
struct Source {
    SubsystemId id = 0;
    std::vector<VarId> outputs;
    PolynomialVector set;
    std::vector<double> value;
};

struct Interconnection {
    VariableTable variables;
    std::map<SubsystemId, Subsystem> subsystems;
    std::map<SubsystemId, Source> sources;
    /// (parent, child) pairs
    std::set<std::pair<SubsystemId, SubsystemId>> edges;

    [[nodiscard]] std::vector<SubsystemId> parents(SubsystemId id) const;
    [[nodiscard]] std::vector<SubsystemId> children(SubsystemId id) const;
    [[nodiscard]] bool is_source(SubsystemId id) const { return sources.contains(id); }
    /// Output variables of a subsystem or source.
    [[nodiscard]] const std::vector<VarId>& outputs_of(SubsystemId id) const;
};

/// Empty iff every edge names known nodes, every subsystem's input groups
/// match its parents' outputs exactly and every polynomial stays within its
/// declared variables.
std::vector<std::string> validate_interconnection(const Interconnection& sys);

enum class GraphClass { Acyclic, Homogeneous, General };
std::string to_string(GraphClass c);

bool has_cycle(const Interconnection& sys);

/// Text that is identical for two subsystems exactly when they coincide
/// after renaming variables positionally (state, outputs, input groups).
std::string structural_signature(const Subsystem& s, const VariableTable& vars);

/// Acyclic wins over Homogeneous; Homogeneous needs identical signatures,
/// identical parent counts and no sources.
GraphClass classify(const Interconnection& sys);

/// Positional variable map taking `from` onto `to` (state, outputs, inputs).
std::map<VarId, VarId> renaming(const Subsystem& from, const Subsystem& to);
Polynomial rename(const Polynomial& p, const std::map<VarId, VarId>& map);
PolynomialVector rename(const PolynomialVector& p, const std::map<VarId, VarId>& map);

/// d^child_parent - delta, or an empty vector when parent is not a neighbor.
PolynomialVector project_assumption(const Subsystem& child, SubsystemId parent, double delta);

/// Componentwise minimum of a vector of polynomials at a dense point.
double min_component(const PolynomialVector& g, std::span<const double> point);

} // namespace agcv
