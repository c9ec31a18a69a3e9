// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/compatibility.hpp"

#include <algorithm>
#include <stdexcept>

#include "agcv/contracts/local_model.hpp"
#include "agcv/sos/program.hpp"

namespace agcv {

PolynomialVector composed_bounds(const Subsystem& parent, const Subsystem& child) {
    const InputGroup* g = child.input_from(parent.id);
    if (g == nullptr) {
        throw std::invalid_argument("subsystem " + std::to_string(parent.id) + " is not a parent of " +
                                    std::to_string(child.id));
    }
    std::map<VarId, Polynomial> out;
    for (std::size_t k = 0; k < parent.outputs.size(); ++k) {
        out.emplace(parent.outputs[k], parent.output_map[k]);
    }
    PolynomialVector res;
    for (const auto& d : g->bounds) {
        res.push_back(compose(d, out));
    }
    return res;
}

namespace {

// d_c - delta - sum_r s_edge.c[.r] * m_r in Σ[vars] for every component c
sos::ProgramResult solve_edge(const PolynomialVector& d, double delta, const PolynomialVector& multiplicands,
                              const std::vector<VarId>& vars, bool suffix_r, unsigned sigma_degree,
                              const CompatibilitySettings& settings) {
    sos::SosProgram prog;
    for (std::size_t c = 0; c < d.size(); ++c) {
        sos::LinearExpr e = d[c] - Polynomial(delta);
        for (std::size_t r = 0; r < multiplicands.size(); ++r) {
            const std::string name =
                "s_edge." + std::to_string(c) + (suffix_r ? "." + std::to_string(r) : std::string());
            const sos::LinearExpr s = prog.new_sos(name, vars, sigma_degree);
            e -= s * sos::LinearExpr(multiplicands[r]);
        }
        prog.add_sos("edge." + std::to_string(c), std::move(e), vars);
    }
    return sos::solve(prog, settings.solver, settings.extract);
}

} // namespace

CompatibilityResult check_compatibility(const Subsystem& parent, const Contract& parent_contract,
                                        const Subsystem& child, double child_delta,
                                        const CompatibilitySettings& settings) {
    CompatibilityResult res;
    const Normalization& norm = parent_contract.normalization;
    const PolynomialVector d = norm.to_normalized(composed_bounds(parent, child));
    const auto h_it = parent_contract.evidence.polynomials.find("h");
    if (h_it == parent_contract.evidence.polynomials.end()) {
        res.failure = "parent contract has no barrier";
        return res;
    }
    const Polynomial& h = h_it->second;
    const int dd = max_degree(d);
    auto accept = [&](const sos::ProgramResult& r, const std::string& via) {
        EdgeEvidence ev;
        ev.parent = parent.id;
        ev.child = child.id;
        ev.delta = child_delta;
        ev.via = via;
        ev.normalization = norm;
        ev.evidence = ProgramEvidence::from(r.extraction);
        res.established = true;
        res.evidence = std::move(ev);
    };
    const unsigned sb = even_degree(std::max(h.degree(), dd - h.degree())) + 2 * (settings.degree_boost / 2);
    const auto rb = solve_edge(d, child_delta, {h}, parent.state, false, sb, settings);
    if (rb.feasible()) {
        accept(rb, "barrier");
        return res;
    }
    res.failure = "barrier multiplier search: " + std::string(sdp::to_string(rb.status));
    if (!settings.region_fallback) {
        return res;
    }
    PolynomialVector region = norm.to_normalized(parent_contract.guarantee_region(parent));
    const unsigned sr = multiplier_degree(std::max(dd, max_degree(region)), max_degree(region)) +
                        2 * (settings.degree_boost / 2);
    const auto rr = solve_edge(d, child_delta, region, parent.state, true, sr, settings);
    if (rr.feasible()) {
        accept(rr, "region");
        res.failure.clear();
        return res;
    }
    res.failure += "; region multiplier search: " + std::string(sdp::to_string(rr.status));
    return res;
}

std::vector<CompatibilityResult> check_compatibility(const Interconnection& sys,
                                                     const std::map<SubsystemId, Contract>& parent_contracts,
                                                     const Subsystem& child, double child_delta,
                                                     const CompatibilitySettings& settings) {
    std::vector<CompatibilityResult> out;
    for (const SubsystemId p : sys.parents(child.id)) {
        if (sys.is_source(p)) {
            const auto& src = sys.sources.at(p);
            out.push_back(check_source_compatibility(src, child, child_delta, subsystem_normalization(child), settings));
        } else {
            const auto it = parent_contracts.find(p);
            if (it == parent_contracts.end()) {
                CompatibilityResult r;
                r.failure = "no contract for parent " + std::to_string(p);
                out.push_back(std::move(r));
            } else {
                out.push_back(check_compatibility(sys.subsystems.at(p), it->second, child, child_delta, settings));
            }
        }
        if (!out.back().established) {
            break;
        }
    }
    return out;
}

CompatibilityResult check_source_compatibility(const Source& source, const Subsystem& child, double child_delta,
                                               const Normalization& child_normalization,
                                               const CompatibilitySettings& settings) {
    CompatibilityResult res;
    const InputGroup* g = child.input_from(source.id);
    if (g == nullptr) {
        res.failure = "source is not a parent of the child";
        return res;
    }
    Normalization norm;
    for (const VarId v : source.outputs) {
        norm.axes[v] = child_normalization.axis(v);
    }
    const PolynomialVector d = norm.to_normalized(g->bounds);
    const PolynomialVector set = norm.to_normalized(source.set);
    const unsigned s = multiplier_degree(std::max(max_degree(d), max_degree(set)), max_degree(set)) +
                       2 * (settings.degree_boost / 2);
    const auto r = solve_edge(d, child_delta, set, source.outputs, true, s, settings);
    if (!r.feasible()) {
        res.failure = "source multiplier search: " + std::string(sdp::to_string(r.status));
        return res;
    }
    EdgeEvidence ev;
    ev.parent = source.id;
    ev.child = child.id;
    ev.delta = child_delta;
    ev.via = "source";
    ev.normalization = norm;
    ev.evidence = ProgramEvidence::from(r.extraction);
    res.established = true;
    res.evidence = std::move(ev);
    return res;
}

} // namespace agcv
