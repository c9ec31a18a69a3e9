// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/negotiation/negotiation.hpp"

#include <algorithm>
#include <future>
#include <stdexcept>

#include "agcv/contracts/local_model.hpp"
#include "agcv/poly/parse.hpp"
#include "agcv/sos/program.hpp"

namespace agcv {

std::string to_string(Algorithm a) {
    switch (a) {
    case Algorithm::Auto:
        return "auto";
    case Algorithm::Acyclic:
        return "acyclic";
    case Algorithm::Homogeneous:
        return "homogeneous";
    case Algorithm::General:
        return "general";
    }
    return "auto";
}

Algorithm algorithm_from_string(const std::string& s) {
    for (const Algorithm a : {Algorithm::Auto, Algorithm::Acyclic, Algorithm::Homogeneous, Algorithm::General}) {
        if (to_string(a) == s) {
            return a;
        }
    }
    throw std::invalid_argument("unknown algorithm '" + s + "' (expected auto, acyclic, homogeneous or general)");
}

void NegotiationConfig::validate() const {
    synthesis.validate();
    if (iteration_cap < 1) {
        throw std::invalid_argument("iteration_cap must be at least 1");
    }
}

std::vector<std::pair<std::string, std::string>> NegotiationConfig::snapshot() const {
    auto out = synthesis.snapshot();
    out.emplace_back("algorithm", to_string(algorithm));
    out.emplace_back("iteration_cap", std::to_string(iteration_cap));
    out.emplace_back("selective_update", selective_update ? "true" : "false");
    out.emplace_back("degree_retry", degree_retry ? "true" : "false");
    return out;
}

NegotiationState NegotiationState::initial(const Interconnection& sys) {
    NegotiationState st;
    for (const auto& [id, s] : sys.subsystems) {
        (sys.children(id).empty() ? st.ready : st.pending).insert(id);
        st.safe_offsets[id] = 0.0;
    }
    return st;
}

NegotiationState update_index_sets(NegotiationState state, SubsystemId finished, const Interconnection& sys) {
    if (state.ready.erase(finished) == 0) {
        throw std::invalid_argument("subsystem " + std::to_string(finished) + " is not ready");
    }
    state.done.insert(finished);
    std::vector<SubsystemId> promote;
    for (const SubsystemId k : state.pending) {
        const auto ch = sys.children(k);
        if (std::all_of(ch.begin(), ch.end(), [&](SubsystemId c) { return state.done.contains(c); })) {
            promote.push_back(k);
        }
    }
    for (const SubsystemId k : promote) {
        state.pending.erase(k);
        state.ready.insert(k);
    }
    return state;
}

namespace {

class Recorder {
  public:
    Recorder(std::vector<TraceRecord>& trace, const StepLog& log) : trace_(trace), log_(log) {}

    void add(const std::string& node, std::string operation, std::vector<std::pair<std::string, double>> values,
             std::string status, std::string note = {}) {
        TraceRecord r;
        r.step = static_cast<int>(trace_.size()) + 1;
        r.node = node;
        r.operation = std::move(operation);
        r.values = std::move(values);
        r.status = std::move(status);
        r.note = std::move(note);
        trace_.push_back(r);
        if (log_) {
            log_(trace_.back());
        }
    }

  private:
    std::vector<TraceRecord>& trace_;
    const StepLog& log_;
};

std::vector<ChildAssumption> child_assumptions(const Interconnection& sys, SubsystemId id,
                                               const std::map<SubsystemId, Contract>& contracts) {
    std::vector<ChildAssumption> out;
    for (const SubsystemId k : sys.children(id)) {
        const auto it = contracts.find(k);
        if (it == contracts.end()) {
            continue;
        }
        out.push_back({k, sys.subsystems.at(k).input_from(id)->bounds, it->second.delta});
    }
    return out;
}

struct NodeOutcome {
    bool ok = false;
    double offset = 0.0;
    double delta = 0.0;
    double zeta = 0.0;
    std::optional<Contract> contract;
    std::string failed;
    std::string reason;
    std::string note;
};

// delta*, then zeta* at delta*, for a fixed working safe region
NodeOutcome synthesize(const Subsystem& s, double offset, const SynthesisConfig& cfg) {
    NodeOutcome out;
    out.offset = offset;
    const ScalarSearch in = maximal_internal_input_set(s, 0.0, cfg, offset);
    if (!in.feasible) {
        out.failed = "maximal_internal_input_set";
        out.reason = in.reason;
        return out;
    }
    out.delta = in.value;
    const ScalarSearch sr = minimal_safe_region(s, in.value, cfg, offset);
    if (sr.feasible) {
        out.zeta = sr.value;
        out.contract = sr.contract;
    } else {
        out.zeta = 0.0;
        out.contract = in.contract;
        out.note = "safe-region program failed, kept zeta = 0: " + sr.reason;
    }
    out.ok = true;
    return out;
}

// safe-region update against the children's assumptions, then synthesize
NodeOutcome node_update(const Interconnection& sys, SubsystemId id, double offset,
                        const std::map<SubsystemId, Contract>& contracts, const SynthesisConfig& cfg) {
    const Subsystem& s = sys.subsystems.at(id);
    const ScalarSearch upd = update_safe_region(s, child_assumptions(sys, id, contracts), offset, cfg);
    if (!upd.feasible) {
        NodeOutcome out;
        out.offset = offset;
        out.failed = "update_safe_region";
        out.reason = upd.reason;
        return out;
    }
    return synthesize(s, upd.value, cfg);
}

template <typename F>
std::vector<NodeOutcome> for_each_node(const std::vector<SubsystemId>& ids, bool parallel, F&& f) {
    std::vector<NodeOutcome> out(ids.size());
    if (!parallel || ids.size() < 2) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            out[i] = f(ids[i]);
        }
        return out;
    }
    std::vector<std::future<NodeOutcome>> jobs;
    jobs.reserve(ids.size());
    for (const SubsystemId id : ids) {
        jobs.push_back(std::async(std::launch::async, [&f, id] { return f(id); }));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out[i] = jobs[i].get();
    }
    return out;
}

std::vector<std::pair<std::string, double>> node_values(const NodeOutcome& o) {
    return {{"safe_offset", o.offset}, {"delta", o.delta}, {"zeta", o.zeta}};
}

Certificate start(const Interconnection& sys, const NegotiationConfig& cfg, const std::string& algorithm) {
    Certificate cert;
    cert.algorithm = algorithm;
    cert.graph_class = to_string(classify(sys));
    cert.config = cfg.snapshot();
    return cert;
}

Certificate fail(Certificate cert, std::string reason) {
    cert.verdict = false;
    cert.reason = std::move(reason);
    return cert;
}

std::string node_name(SubsystemId id) { return std::to_string(id); }

std::string edge_name(SubsystemId p, SubsystemId c) { return std::to_string(p) + "->" + std::to_string(c); }

// Peak of d - delta over the input variables: for d = r^2 - (y - b)^2 this is
// the squared radius of the assumption interval.
double assumption_peak(const Subsystem& child, SubsystemId parent, double delta) {
    const InputGroup* g = child.input_from(parent);
    return analyze_superlevel(g->bounds, g->vars).peak - delta;
}

// Checks every edge; fills cert.edges and returns the failing edges.
std::vector<std::pair<SubsystemId, SubsystemId>> check_edges(const Interconnection& sys, Certificate& cert,
                                                             const NegotiationConfig& cfg, Recorder& rec) {
    CompatibilitySettings cs;
    cs.solver = cfg.synthesis.solver;
    cs.extract = cfg.synthesis.extract;
    std::vector<std::pair<SubsystemId, SubsystemId>> failing;
    cert.edges.clear();
    for (const auto& [p, c] : sys.edges) {
        const Contract& cc = cert.contracts.at(c);
        const Subsystem& child = sys.subsystems.at(c);
        CompatibilityResult r;
        if (sys.is_source(p)) {
            r = check_source_compatibility(sys.sources.at(p), child, cc.delta, cc.normalization, cs);
            rec.add(edge_name(p, c), "root_assumption",
                    {{"delta", cc.delta}, {"assumption_peak", assumption_peak(child, p, cc.delta)}},
                    r.established ? "holds" : "not_established", r.failure);
        } else {
            r = check_compatibility(sys.subsystems.at(p), cert.contracts.at(p), child, cc.delta, cs);
            rec.add(edge_name(p, c), "compatibility", {{"delta", cc.delta}},
                    r.established ? "established" : "not_established", r.failure);
        }
        if (r.established) {
            cert.edges.push_back(std::move(*r.evidence));
        } else {
            failing.emplace_back(p, c);
        }
    }
    return failing;
}

std::string describe(const std::vector<std::pair<SubsystemId, SubsystemId>>& edges) {
    std::string s;
    for (const auto& [p, c] : edges) {
        s += (s.empty() ? "" : ", ") + edge_name(p, c);
    }
    return s;
}

// Contract of `from` carried over to an identical subsystem `to`.
Contract broadcast(const Contract& c, const Subsystem& from, const Subsystem& to) {
    const auto map = renaming(from, to);
    std::map<std::string, std::string> labels;
    for (std::size_t g = 0; g < from.inputs.size(); ++g) {
        labels["s_in." + std::to_string(from.inputs[g].parent) + "."] =
            "s_in." + std::to_string(to.inputs[g].parent) + ".";
    }
    auto relabel = [&](const std::string& name) {
        for (const auto& [a, b] : labels) {
            if (name.starts_with(a)) {
                return b + name.substr(a.size());
            }
        }
        return name;
    };
    Contract out = c;
    out.subsystem = to.id;
    out.barrier = rename(c.barrier, map);
    out.normalization.axes.clear();
    for (const auto& [v, a] : c.normalization.axes) {
        const auto it = map.find(v);
        out.normalization.axes[it == map.end() ? v : it->second] = a;
    }
    out.evidence.polynomials.clear();
    for (const auto& [name, p] : c.evidence.polynomials) {
        out.evidence.polynomials[relabel(name)] = rename(p, map);
    }
    for (auto& g : out.evidence.grams) {
        g.label = relabel(g.label);
        for (auto& m : g.basis) {
            m = rename(Polynomial(m), map).terms().begin()->first;
        }
    }
    return out;
}

void degree_retry(const Interconnection& sys, SubsystemId id, double offset, const NegotiationState& st,
                  const NegotiationConfig& cfg, Recorder& rec) {
    if (!cfg.degree_retry) {
        return;
    }
    SynthesisConfig boosted = cfg.synthesis;
    boosted.degree_boost += 2;
    const NodeOutcome again = node_update(sys, id, offset, st.contracts, boosted);
    rec.add(node_name(id), "degree_retry", {{"degree_boost", static_cast<double>(boosted.degree_boost)}},
            again.ok ? "degree_limited" : "still_infeasible",
            again.ok ? "verdict is limited by the certificate degrees" : again.reason);
}

// Bottom-up traversal until no node is ready. Returns false (with the
// certificate marked) on a local failure.
bool traverse(const Interconnection& sys, const NegotiationConfig& cfg, NegotiationState& st, Certificate& cert,
              Recorder& rec) {
    while (!st.ready.empty()) {
        const std::vector<SubsystemId> layer(st.ready.begin(), st.ready.end());
        const auto contracts = st.contracts;
        const auto results = for_each_node(layer, cfg.parallel, [&](SubsystemId id) {
            return node_update(sys, id, st.safe_offsets.at(id), contracts, cfg.synthesis);
        });
        for (std::size_t i = 0; i < layer.size(); ++i) {
            const SubsystemId id = layer[i];
            const NodeOutcome& o = results[i];
            if (!o.ok) {
                rec.add(node_name(id), "node_update", node_values(o), "infeasible", o.failed + ": " + o.reason);
                degree_retry(sys, id, st.safe_offsets.at(id), st, cfg, rec);
                cert = fail(std::move(cert), "subsystem " + node_name(id) + ", " + o.failed + ": " + o.reason);
                return false;
            }
            rec.add(node_name(id), "node_update", node_values(o), "ok", o.note);
            st.safe_offsets[id] = o.offset;
            st.contracts[id] = *o.contract;
            st = update_index_sets(std::move(st), id, sys);
        }
    }
    return true;
}

} // namespace

Certificate negotiate_acyclic(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log) {
    cfg.validate();
    if (has_cycle(sys)) {
        throw std::invalid_argument("acyclic negotiation requires a graph without directed cycles");
    }
    Certificate cert = start(sys, cfg, "acyclic");
    Recorder rec(cert.trace, log);
    NegotiationState st = NegotiationState::initial(sys);
    cert.iterations = 1;
    if (!traverse(sys, cfg, st, cert, rec)) {
        cert.contracts = st.contracts;
        return cert;
    }
    cert.contracts = st.contracts;
    const auto failing = check_edges(sys, cert, cfg, rec);
    if (!failing.empty()) {
        return fail(std::move(cert), "compatibility not established on " + describe(failing));
    }
    cert.verdict = true;
    return cert;
}

double homogeneous_premise_level(const Subsystem& s, const SynthesisConfig& cfg) {
    const Normalization norm = cfg.normalize ? normalization_for(s.safe_region, s.state) : Normalization{};
    const PolynomialVector q = norm.to_normalized(s.safe_region);
    const PolynomialVector b0 = norm.to_normalized(s.initial_set);
    const double peak = analyze_superlevel(s.safe_region, s.state).peak;
    if (!(peak > 0.0)) {
        return -1.0;
    }
    auto probe = [&](double a) {
        sos::SosProgram prog;
        for (std::size_t c = 0; c < b0.size(); ++c) {
            sos::LinearExpr e = b0[c];
            for (std::size_t r = 0; r < q.size(); ++r) {
                const unsigned d = multiplier_degree(std::max(b0[c].degree(), q[r].degree()), q[r].degree());
                const auto sig = prog.new_sos("s." + std::to_string(c) + "." + std::to_string(r), s.state, d);
                e -= sig * sos::LinearExpr(q[r] - Polynomial(a));
            }
            prog.add_sos("premise." + std::to_string(c), std::move(e), s.state);
        }
        return sos::solve(prog, cfg.solver, cfg.extract);
    };
    const auto b = sos::bisect_scalar(probe, sos::Direction::MinimizeFindSmallestFeasible, 0.0, peak,
                                      cfg.bisection_tol);
    if (b.outcome != sos::BisectionOutcome::Found || !(b.value > 0.0) || b.value >= peak) {
        return -1.0;
    }
    return b.value;
}

Certificate negotiate_homogeneous(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log) {
    cfg.validate();
    if (classify(sys) != GraphClass::Homogeneous) {
        throw std::invalid_argument("homogeneous negotiation requires identical subsystems on a cyclic graph");
    }
    Certificate cert = start(sys, cfg, "homogeneous");
    Recorder rec(cert.trace, log);
    const Subsystem& rep = sys.subsystems.begin()->second;
    const double premise = homogeneous_premise_level(rep, cfg.synthesis);
    rec.add(node_name(rep.id), "premise", {{"level", premise}}, premise > 0.0 ? "verified" : "unverified",
            premise > 0.0 ? "" : "no level a > 0 with {q >= a} inside the initial set was certified");
    double offset = 0.0;
    for (int it = 1; it <= cfg.iteration_cap; ++it) {
        cert.iterations = it;
        const NodeOutcome o = synthesize(rep, offset, cfg.synthesis);
        auto values = node_values(o);
        values.emplace_back("iteration", it);
        if (!o.ok) {
            rec.add(node_name(rep.id), "node_update", values, "infeasible", o.failed + ": " + o.reason);
            return fail(std::move(cert), "iteration " + std::to_string(it) + ", representative " +
                                             node_name(rep.id) + ", " + o.failed + ": " + o.reason);
        }
        rec.add(node_name(rep.id), "node_update", values, "ok", o.note);
        cert.contracts.clear();
        for (const auto& [id, s] : sys.subsystems) {
            cert.contracts[id] = id == rep.id ? *o.contract : broadcast(*o.contract, rep, s);
        }
        rec.add("all", "broadcast", {{"iteration", it}}, "ok");
        const auto failing = check_edges(sys, cert, cfg, rec);
        if (failing.empty()) {
            cert.verdict = true;
            return cert;
        }
        const ScalarSearch upd = update_safe_region(rep, child_assumptions(sys, rep.id, cert.contracts), offset,
                                                    cfg.synthesis);
        rec.add(node_name(rep.id), "update_safe_region", {{"iteration", it}, {"safe_offset", upd.value}},
                upd.feasible ? "ok" : "infeasible", upd.reason);
        if (!upd.feasible) {
            return fail(std::move(cert), "iteration " + std::to_string(it) + ": " + upd.reason);
        }
        if (upd.value <= offset) {
            return fail(std::move(cert), "iteration " + std::to_string(it) +
                                             ": safe-region update made no progress; incompatible edges " +
                                             describe(failing));
        }
        offset = upd.value;
    }
    return fail(std::move(cert), "iteration cap " + std::to_string(cfg.iteration_cap) + " reached");
}

Certificate negotiate_general(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log) {
    cfg.validate();
    if (!has_cycle(sys)) {
        return negotiate_acyclic(sys, cfg, log);
    }
    Certificate cert = start(sys, cfg, "general");
    Recorder rec(cert.trace, log);
    NegotiationState st = NegotiationState::initial(sys);
    cert.iterations = 0;
    if (!traverse(sys, cfg, st, cert, rec)) {
        cert.contracts = st.contracts;
        return cert;
    }
    const std::vector<SubsystemId> cyclic(st.pending.begin(), st.pending.end());
    for (int it = 1; it <= cfg.iteration_cap; ++it) {
        cert.iterations = it;
        const auto results = for_each_node(cyclic, cfg.parallel, [&](SubsystemId id) {
            return synthesize(sys.subsystems.at(id), st.safe_offsets.at(id), cfg.synthesis);
        });
        for (std::size_t i = 0; i < cyclic.size(); ++i) {
            auto values = node_values(results[i]);
            values.emplace_back("iteration", it);
            if (!results[i].ok) {
                rec.add(node_name(cyclic[i]), "node_update", values, "infeasible",
                        results[i].failed + ": " + results[i].reason);
                cert.contracts = st.contracts;
                return fail(std::move(cert), "iteration " + std::to_string(it) + ", subsystem " +
                                                 node_name(cyclic[i]) + ", " + results[i].failed + ": " +
                                                 results[i].reason);
            }
            rec.add(node_name(cyclic[i]), "node_update", values, "ok", results[i].note);
            st.contracts[cyclic[i]] = *results[i].contract;
        }
        cert.contracts = st.contracts;
        const auto failing = check_edges(sys, cert, cfg, rec);
        if (failing.empty()) {
            cert.verdict = true;
            return cert;
        }
        bool moved = false;
        for (const SubsystemId id : cyclic) {
            if (cfg.selective_update &&
                std::none_of(failing.begin(), failing.end(), [&](const auto& e) { return e.first == id; })) {
                continue;
            }
            const double before = st.safe_offsets.at(id);
            const ScalarSearch upd =
                update_safe_region(sys.subsystems.at(id), child_assumptions(sys, id, st.contracts), before,
                                   cfg.synthesis);
            rec.add(node_name(id), "update_safe_region", {{"iteration", it}, {"safe_offset", upd.value}},
                    upd.feasible ? "ok" : "infeasible", upd.reason);
            if (!upd.feasible) {
                return fail(std::move(cert), "iteration " + std::to_string(it) + ", subsystem " + node_name(id) +
                                                 ": " + upd.reason);
            }
            moved = moved || upd.value > before;
            st.safe_offsets[id] = upd.value;
        }
        if (!moved) {
            return fail(std::move(cert), "iteration " + std::to_string(it) +
                                             ": safe-region update made no progress; incompatible edges " +
                                             describe(failing));
        }
    }
    return fail(std::move(cert), "iteration cap " + std::to_string(cfg.iteration_cap) + " reached");
}

Certificate run(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log) {
    const auto issues = validate_interconnection(sys);
    if (!issues.empty()) {
        throw std::invalid_argument("invalid interconnection: " + issues.front());
    }
    const GraphClass cls = classify(sys);
    switch (cfg.algorithm) {
    case Algorithm::Auto:
        if (cls == GraphClass::Acyclic) {
            return negotiate_acyclic(sys, cfg, log);
        }
        if (cls == GraphClass::Homogeneous) {
            return negotiate_homogeneous(sys, cfg, log);
        }
        return negotiate_general(sys, cfg, log);
    case Algorithm::Acyclic:
        if (cls != GraphClass::Acyclic) {
            throw std::invalid_argument("algorithm 'acyclic' requested for a " + to_string(cls) + " graph");
        }
        return negotiate_acyclic(sys, cfg, log);
    case Algorithm::Homogeneous:
        if (cls != GraphClass::Homogeneous) {
            throw std::invalid_argument("algorithm 'homogeneous' requested for a " + to_string(cls) + " graph");
        }
        return negotiate_homogeneous(sys, cfg, log);
    case Algorithm::General:
        return negotiate_general(sys, cfg, log);
    }
    return negotiate_general(sys, cfg, log);
}

} // namespace agcv
