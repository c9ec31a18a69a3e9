// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/interconnection.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

#include "agcv/poly/parse.hpp"

namespace agcv {

std::vector<VarId> Subsystem::input_vars() const {
    std::vector<VarId> out;
    for (const auto& g : inputs) {
        out.insert(out.end(), g.vars.begin(), g.vars.end());
    }
    return out;
}

const InputGroup* Subsystem::input_from(SubsystemId parent) const {
    for (const auto& g : inputs) {
        if (g.parent == parent) {
            return &g;
        }
    }
    return nullptr;
}

std::vector<SubsystemId> Interconnection::parents(SubsystemId id) const {
    std::vector<SubsystemId> out;
    for (const auto& [p, c] : edges) {
        if (c == id) {
            out.push_back(p);
        }
    }
    return out;
}

std::vector<SubsystemId> Interconnection::children(SubsystemId id) const {
    std::vector<SubsystemId> out;
    for (const auto& [p, c] : edges) {
        if (p == id) {
            out.push_back(c);
        }
    }
    return out;
}

const std::vector<VarId>& Interconnection::outputs_of(SubsystemId id) const {
    if (const auto it = subsystems.find(id); it != subsystems.end()) {
        return it->second.outputs;
    }
    if (const auto it = sources.find(id); it != sources.end()) {
        return it->second.outputs;
    }
    throw std::out_of_range("unknown node " + std::to_string(id));
}

namespace {

bool within(const Polynomial& p, const std::vector<VarId>& allowed) {
    for (const VarId v : p.variables()) {
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            return false;
        }
    }
    return true;
}

bool within(const PolynomialVector& ps, const std::vector<VarId>& allowed) {
    return std::all_of(ps.begin(), ps.end(), [&](const Polynomial& p) { return within(p, allowed); });
}

} // namespace

std::vector<std::string> validate_interconnection(const Interconnection& sys) {
    std::vector<std::string> issues;
    auto node_name = [](SubsystemId id) { return "subsystem " + std::to_string(id); };
    for (const auto& [p, c] : sys.edges) {
        if (!sys.subsystems.contains(p) && !sys.sources.contains(p)) {
            issues.push_back("edge " + std::to_string(p) + " -> " + std::to_string(c) + " references unknown parent");
        }
        if (!sys.subsystems.contains(c)) {
            issues.push_back("edge " + std::to_string(p) + " -> " + std::to_string(c) + " references unknown child");
        }
        if (p == c) {
            issues.push_back("edge " + std::to_string(p) + " -> " + std::to_string(c) + " is a self loop");
        }
    }
    for (const auto& [id, src] : sys.sources) {
        if (sys.subsystems.contains(id)) {
            issues.push_back("id " + std::to_string(id) + " is both a source and a subsystem");
        }
        if (src.set.empty()) {
            issues.push_back("source " + std::to_string(id) + " has no set");
        }
        if (!within(src.set, src.outputs)) {
            issues.push_back("source " + std::to_string(id) + " set uses variables outside its outputs");
        }
        if (!src.value.empty() && src.value.size() != src.outputs.size()) {
            issues.push_back("source " + std::to_string(id) + " value has the wrong length");
        }
    }
    std::set<VarId> seen_state;
    for (const auto& [id, s] : sys.subsystems) {
        const std::string who = node_name(id);
        if (s.state.empty()) {
            issues.push_back(who + " has no state variables");
        }
        for (const VarId v : s.state) {
            if (!seen_state.insert(v).second) {
                issues.push_back(who + " reuses state variable " + sys.variables.name(v));
            }
        }
        if (s.dynamics.size() != s.state.size()) {
            issues.push_back(who + " dynamics dimension differs from its state dimension");
        }
        if (s.output_map.size() != s.outputs.size()) {
            issues.push_back(who + " output map dimension differs from its output variables");
        }
        if (s.initial_set.empty() || s.safe_region.empty()) {
            issues.push_back(who + " needs an initial set and a safe region");
        }
        std::vector<VarId> dyn_vars = s.state;
        const auto in = s.input_vars();
        dyn_vars.insert(dyn_vars.end(), in.begin(), in.end());
        if (!within(s.dynamics, dyn_vars)) {
            issues.push_back(who + " dynamics use undeclared variables");
        }
        if (!within(s.output_map, s.state) || !within(s.initial_set, s.state) || !within(s.safe_region, s.state)) {
            issues.push_back(who + " output map or sets use variables outside the state");
        }
        std::set<SubsystemId> from_edges;
        for (const SubsystemId p : sys.parents(id)) {
            from_edges.insert(p);
        }
        std::set<SubsystemId> from_groups;
        for (const auto& g : s.inputs) {
            if (!from_groups.insert(g.parent).second) {
                issues.push_back(who + " has two input groups for parent " + std::to_string(g.parent));
            }
            if (g.bounds.empty()) {
                issues.push_back(who + " input group from " + std::to_string(g.parent) + " has no bounds");
            }
            if (!within(g.bounds, g.vars)) {
                issues.push_back(who + " input bounds from " + std::to_string(g.parent) + " use other variables");
            }
            if (sys.subsystems.contains(g.parent) || sys.sources.contains(g.parent)) {
                if (sys.outputs_of(g.parent) != g.vars) {
                    issues.push_back(who + " inputs from " + std::to_string(g.parent) +
                                     " do not match that node's outputs");
                }
            }
        }
        if (from_edges != from_groups) {
            issues.push_back(who + " input groups do not match its parents in the edge list");
        }
    }
    return issues;
}

std::string to_string(GraphClass c) {
    switch (c) {
    case GraphClass::Acyclic:
        return "Acyclic";
    case GraphClass::Homogeneous:
        return "Homogeneous";
    case GraphClass::General:
        return "General";
    }
    return "General";
}

bool has_cycle(const Interconnection& sys) {
    // colors: 0 unvisited, 1 on stack, 2 done
    std::map<SubsystemId, int> color;
    std::function<bool(SubsystemId)> visit = [&](SubsystemId n) {
        color[n] = 1;
        for (const SubsystemId c : sys.children(n)) {
            const int col = color[c];
            if (col == 1 || (col == 0 && visit(c))) {
                return true;
            }
        }
        color[n] = 2;
        return false;
    };
    for (const auto& [id, s] : sys.subsystems) {
        if (color[id] == 0 && visit(id)) {
            return true;
        }
    }
    return false;
}

std::string structural_signature(const Subsystem& s, const VariableTable& vars) {
    VariableTable canon;
    std::map<VarId, VarId> map;
    for (std::size_t k = 0; k < s.state.size(); ++k) {
        map[s.state[k]] = canon.intern("s" + std::to_string(k));
    }
    for (std::size_t k = 0; k < s.outputs.size(); ++k) {
        if (!map.contains(s.outputs[k])) {
            map[s.outputs[k]] = canon.intern("o" + std::to_string(k));
        }
    }
    for (std::size_t g = 0; g < s.inputs.size(); ++g) {
        for (std::size_t k = 0; k < s.inputs[g].vars.size(); ++k) {
            if (!map.contains(s.inputs[g].vars[k])) {
                map[s.inputs[g].vars[k]] = canon.intern("w" + std::to_string(g) + "_" + std::to_string(k));
            }
        }
    }
    (void)vars;
    std::string sig;
    auto emit = [&](const std::string& tag, const PolynomialVector& ps) {
        sig += tag + "{";
        for (const auto& p : ps) {
            sig += to_string(rename(p, map), canon) + ";";
        }
        sig += "}";
    };
    sig += "n=" + std::to_string(s.state.size()) + " m=" + std::to_string(s.outputs.size()) +
           " p=" + std::to_string(s.inputs.size()) + " ";
    emit("f", s.dynamics);
    emit("o", s.output_map);
    emit("b0", s.initial_set);
    emit("q", s.safe_region);
    for (const auto& g : s.inputs) {
        sig += "|" + std::to_string(g.vars.size());
        emit("d", g.bounds);
    }
    sig += " a=" + (s.gain_a ? format_double(*s.gain_a) : std::string("default"));
    return sig;
}

GraphClass classify(const Interconnection& sys) {
    if (!has_cycle(sys)) {
        return GraphClass::Acyclic;
    }
    if (!sys.sources.empty() || sys.subsystems.empty()) {
        return GraphClass::General;
    }
    const auto& first = sys.subsystems.begin()->second;
    const std::string sig = structural_signature(first, sys.variables);
    const std::size_t np = sys.parents(first.id).size();
    for (const auto& [id, s] : sys.subsystems) {
        if (sys.parents(id).size() != np || structural_signature(s, sys.variables) != sig) {
            return GraphClass::General;
        }
    }
    return GraphClass::Homogeneous;
}

std::map<VarId, VarId> renaming(const Subsystem& from, const Subsystem& to) {
    if (from.state.size() != to.state.size() || from.outputs.size() != to.outputs.size() ||
        from.inputs.size() != to.inputs.size()) {
        throw std::invalid_argument("renaming: subsystems differ in shape");
    }
    std::map<VarId, VarId> map;
    auto add = [&](VarId a, VarId b) {
        const auto [it, inserted] = map.emplace(a, b);
        if (!inserted && it->second != b) {
            throw std::invalid_argument("renaming: inconsistent variable correspondence");
        }
    };
    for (std::size_t k = 0; k < from.state.size(); ++k) {
        add(from.state[k], to.state[k]);
    }
    for (std::size_t k = 0; k < from.outputs.size(); ++k) {
        add(from.outputs[k], to.outputs[k]);
    }
    for (std::size_t g = 0; g < from.inputs.size(); ++g) {
        if (from.inputs[g].vars.size() != to.inputs[g].vars.size()) {
            throw std::invalid_argument("renaming: input groups differ in shape");
        }
        for (std::size_t k = 0; k < from.inputs[g].vars.size(); ++k) {
            add(from.inputs[g].vars[k], to.inputs[g].vars[k]);
        }
    }
    return map;
}

Polynomial rename(const Polynomial& p, const std::map<VarId, VarId>& map) {
    Polynomial out;
    for (const auto& [m, c] : p.terms()) {
        std::vector<Monomial::Power> powers;
        for (const auto& [v, e] : m.powers()) {
            const auto it = map.find(v);
            powers.emplace_back(it == map.end() ? v : it->second, e);
        }
        out.add_term(Monomial(std::move(powers)), c);
    }
    return out;
}

PolynomialVector rename(const PolynomialVector& p, const std::map<VarId, VarId>& map) {
    PolynomialVector out;
    out.reserve(p.size());
    for (const auto& q : p) {
        out.push_back(rename(q, map));
    }
    return out;
}

PolynomialVector project_assumption(const Subsystem& child, SubsystemId parent, double delta) {
    const InputGroup* g = child.input_from(parent);
    if (g == nullptr) {
        return {};
    }
    PolynomialVector out = g->bounds;
    for (auto& d : out) {
        d -= Polynomial(delta);
    }
    return out;
}

double min_component(const PolynomialVector& g, std::span<const double> point) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : g) {
        m = std::min(m, evaluate(p, point));
    }
    return m;
}

} // namespace agcv
