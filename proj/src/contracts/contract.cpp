// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/contract.hpp"

#include <stdexcept>

#include "agcv/contracts/kv.hpp"
#include "agcv/poly/parse.hpp"
#include "agcv/sdp/eigen.hpp"

namespace agcv {

ProgramEvidence ProgramEvidence::from(const sos::Extraction& ex) {
    ProgramEvidence ev;
    ev.polynomials = ex.polynomials;
    ev.grams = ex.constraints;
    ev.grams.insert(ev.grams.end(), ex.unknown_grams.begin(), ex.unknown_grams.end());
    return ev;
}

const sos::GramEvidence* ProgramEvidence::gram(const std::string& label) const {
    for (const auto& g : grams) {
        if (g.label == label) {
            return &g;
        }
    }
    return nullptr;
}

PolynomialVector Contract::assumption(const Subsystem& s, SubsystemId parent) const {
    return project_assumption(s, parent, delta);
}

PolynomialVector Contract::guarantee_region(const Subsystem& s) const {
    PolynomialVector out = s.safe_region;
    for (auto& q : out) {
        q -= Polynomial(safe_offset + zeta);
    }
    return out;
}

namespace {

void write_normalization(KvSection& sec, const Normalization& n, const VariableTable& vars) {
    std::vector<std::string> names;
    std::vector<double> center;
    std::vector<double> scale;
    for (const auto& [v, a] : n.axes) {
        names.push_back(vars.name(v));
        center.push_back(a.center);
        scale.push_back(a.scale);
    }
    sec.set("norm.vars", names);
    sec.set("norm.center", center);
    sec.set("norm.scale", scale);
}

Normalization read_normalization(const KvSection& sec, const VariableTable& vars) {
    Normalization n;
    const auto names = sec.get_strings("norm.vars");
    const auto center = sec.get_doubles("norm.center");
    const auto scale = sec.get_doubles("norm.scale");
    if (names.size() != center.size() || names.size() != scale.size()) {
        const auto& e = sec.at("norm.vars");
        throw KvError(e.line, e.column, "normalization arrays differ in length");
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
        const auto id = vars.find(names[k]);
        if (!id) {
            const auto& e = sec.at("norm.vars");
            throw KvError(e.line, e.column, "unknown variable '" + names[k] + "'");
        }
        if (!(scale[k] > 0.0)) {
            const auto& e = sec.at("norm.scale");
            throw KvError(e.line, e.column, "normalization scale must be positive");
        }
        n.axes[*id] = {center[k], scale[k]};
    }
    return n;
}

void write_evidence(KvSection& sec, const ProgramEvidence& ev, const VariableTable& vars) {
    for (const auto& [name, p] : ev.polynomials) {
        sec.set("poly." + name, to_string(p, vars));
    }
    for (const auto& g : ev.grams) {
        std::vector<std::string> basis;
        for (const auto& m : g.basis) {
            basis.push_back(to_string(Polynomial(m), vars));
        }
        std::vector<double> entries;
        for (Eigen::Index i = 0; i < g.gram.rows(); ++i) {
            for (Eigen::Index j = 0; j < g.gram.cols(); ++j) {
                entries.push_back(g.gram(i, j));
            }
        }
        sec.set("gram." + g.label + ".basis", basis);
        sec.set("gram." + g.label + ".entries", entries);
    }
}

Polynomial parse_in(const KvEntry& e, const VariableTable& vars) {
    try {
        return parse_polynomial(e.value.scalar.text, vars);
    } catch (const ParseError& err) {
        throw KvError(e.value.scalar.line, e.value.scalar.column + static_cast<int>(err.column()),
                      std::string("polynomial: ") + err.what());
    }
}

ProgramEvidence read_evidence(const KvSection& sec, const VariableTable& vars) {
    ProgramEvidence ev;
    for (const auto& e : sec.entries) {
        if (e.key.starts_with("poly.")) {
            ev.polynomials[e.key.substr(5)] = parse_in(e, vars);
        }
    }
    const std::string suffix = ".basis";
    for (const auto& e : sec.entries) {
        if (!e.key.starts_with("gram.") || !e.key.ends_with(suffix)) {
            continue;
        }
        sos::GramEvidence g;
        g.label = e.key.substr(5, e.key.size() - 5 - suffix.size());
        for (const auto& item : e.value.items) {
            const Polynomial m = parse_polynomial(item.text, vars);
            if (m.terms().size() != 1 || m.terms().begin()->second != 1.0) {
                throw KvError(item.line, item.column, "basis entry is not a monomial");
            }
            g.basis.push_back(m.terms().begin()->first);
        }
        const std::string entries_key = "gram." + g.label + ".entries";
        const auto values = sec.get_doubles(entries_key);
        const auto n = static_cast<Eigen::Index>(g.basis.size());
        if (values.size() != g.basis.size() * g.basis.size()) {
            const auto& ee = sec.at(entries_key);
            throw KvError(ee.line, ee.column, "gram entries do not match the basis size");
        }
        g.gram.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                g.gram(i, j) = values[static_cast<std::size_t>(i * n + j)];
            }
        }
        ev.grams.push_back(std::move(g));
    }
    return ev;
}

} // namespace

std::string write_certificate(const Certificate& cert, const VariableTable& vars) {
    KvDocument doc;
    KvSection& root = doc.root();
    root.set_int("certificate_version", kCertificateVersion);
    root.set_bool("verdict", cert.verdict);
    root.set("algorithm", cert.algorithm);
    root.set("graph_class", cert.graph_class);
    root.set("model_hash", cert.model_hash);
    root.set_int("iterations", cert.iterations);
    root.set("reason", cert.reason);
    for (const auto& [id, c] : cert.contracts) {
        KvSection& sec = doc.add_section("contract." + std::to_string(id));
        sec.set("delta", c.delta);
        sec.set("zeta", c.zeta);
        sec.set("safe_offset", c.safe_offset);
        sec.set("gain_a", c.gain_a);
        sec.set("epsilon", c.epsilon);
        sec.set_bool("localized", c.localized);
        sec.set("barrier", to_string(c.barrier, vars));
        write_normalization(sec, c.normalization, vars);
        write_evidence(sec, c.evidence, vars);
    }
    for (const auto& e : cert.edges) {
        KvSection& sec = doc.add_section("edge." + std::to_string(e.parent) + "." + std::to_string(e.child));
        sec.set("delta", e.delta);
        sec.set("via", e.via);
        write_normalization(sec, e.normalization, vars);
        write_evidence(sec, e.evidence, vars);
    }
    KvSection& cfg = doc.add_section("config");
    for (const auto& [k, v] : cert.config) {
        cfg.set(k, v);
    }
    return doc.write();
}

Certificate read_certificate(std::string_view text, const VariableTable& vars) {
    const KvDocument doc = KvDocument::parse(text);
    const KvSection& root = doc.root();
    const long version = root.get_int("certificate_version");
    if (version != kCertificateVersion) {
        const auto& e = root.at("certificate_version");
        throw KvError(e.line, e.column, "unsupported certificate_version " + std::to_string(version));
    }
    root.require_keys({"certificate_version", "verdict", "algorithm", "graph_class", "model_hash", "iterations",
                       "reason"});
    Certificate cert;
    cert.verdict = root.get_bool("verdict");
    cert.algorithm = root.get_string("algorithm");
    cert.graph_class = root.get_string("graph_class");
    cert.model_hash = root.get_string("model_hash");
    cert.iterations = static_cast<int>(root.get_int("iterations"));
    cert.reason = root.get_string("reason");
    for (const auto& sec : doc.sections()) {
        if (sec.name.starts_with("contract.")) {
            Contract c;
            c.subsystem = std::stoi(sec.name.substr(9));
            c.delta = sec.get_double("delta");
            c.zeta = sec.get_double("zeta");
            c.safe_offset = sec.get_double("safe_offset");
            c.gain_a = sec.get_double("gain_a");
            c.epsilon = sec.get_double("epsilon");
            c.localized = sec.get_bool("localized");
            c.barrier = parse_in(sec.at("barrier"), vars);
            c.normalization = read_normalization(sec, vars);
            c.evidence = read_evidence(sec, vars);
            cert.contracts[c.subsystem] = std::move(c);
        } else if (sec.name.starts_with("edge.")) {
            EdgeEvidence e;
            const std::string ids = sec.name.substr(5);
            const auto dot = ids.find('.');
            if (dot == std::string::npos) {
                throw KvError(sec.line, 1, "edge section needs parent and child ids");
            }
            e.parent = std::stoi(ids.substr(0, dot));
            e.child = std::stoi(ids.substr(dot + 1));
            e.delta = sec.get_double("delta");
            e.via = sec.get_string("via");
            e.normalization = read_normalization(sec, vars);
            e.evidence = read_evidence(sec, vars);
            cert.edges.push_back(std::move(e));
        } else if (sec.name == "config") {
            for (const auto& e : sec.entries) {
                cert.config.emplace_back(e.key, e.value.scalar.text);
            }
        } else if (!sec.name.empty()) {
            throw KvError(sec.line, 1, "unexpected section [" + sec.name + "]");
        }
    }
    return cert;
}

std::string write_trace(const std::vector<TraceRecord>& trace) {
    KvDocument doc;
    doc.root().set_int("trace_version", 1);
    doc.root().set_int("records", static_cast<long>(trace.size()));
    for (const auto& r : trace) {
        KvSection& sec = doc.add_section("step." + std::to_string(r.step));
        sec.set("node", r.node);
        sec.set("operation", r.operation);
        sec.set("status", r.status);
        for (const auto& [k, v] : r.values) {
            sec.set("value." + k, v);
        }
        if (!r.note.empty()) {
            sec.set("note", r.note);
        }
    }
    return doc.write();
}

} // namespace agcv
