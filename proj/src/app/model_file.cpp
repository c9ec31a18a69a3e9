// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/app/model_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "agcv/poly/parse.hpp"

namespace agcv::app {

namespace {

Polynomial parse_poly(const KvScalar& s, const VariableTable& vars) {
    try {
        return parse_polynomial(s.text, vars);
    } catch (const ParseError& e) {
        // the scalar column points at the opening quote when quoted
        const int col = s.column + static_cast<int>(e.column()) - (s.quoted ? 0 : 1);
        throw KvError(s.line, col, std::string("polynomial: ") + e.what());
    }
}

PolynomialVector parse_polys(const KvSection& sec, std::string_view key, const VariableTable& vars) {
    const KvEntry& e = sec.at(key);
    PolynomialVector out;
    if (!e.value.is_array) {
        out.push_back(parse_poly(e.value.scalar, vars));
        return out;
    }
    for (const auto& item : e.value.items) {
        out.push_back(parse_poly(item, vars));
    }
    return out;
}

std::vector<VarId> parse_vars(const KvSection& sec, std::string_view key, const VariableTable& vars) {
    const KvEntry& e = sec.at(key);
    std::vector<KvScalar> items = e.value.is_array ? e.value.items : std::vector<KvScalar>{e.value.scalar};
    std::vector<VarId> out;
    for (const auto& s : items) {
        const auto id = vars.find(s.text);
        if (!id) {
            throw KvError(s.line, s.column, "undeclared variable '" + s.text + "'");
        }
        out.push_back(*id);
    }
    return out;
}

int parse_id(const std::string& text, int line) {
    int v = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || v < 0) {
        throw KvError(line, 1, "'" + text + "' is not a non-negative integer id");
    }
    return v;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

void no_bare(const KvSection& sec) {
    if (!sec.bare.empty()) {
        throw KvError(sec.bare.front().line, 1, "expected 'key = value' in [" + sec.name + "]");
    }
}

Subsystem parse_subsystem(const KvSection& sec, int id, const VariableTable& vars) {
    no_bare(sec);
    Subsystem s;
    s.id = id;
    for (const auto& e : sec.entries) {
        const std::string& k = e.key;
        const bool known = k == "state" || k == "outputs" || k == "output_map" || k == "dynamics" ||
                           k == "initial_set" || k == "safe_region" || k == "gain_a" || k.starts_with("inputs.") ||
                           k.starts_with("bounds.");
        if (!known) {
            throw KvError(e.line, e.column, "unknown key '" + k + "' in [" + sec.name + "]");
        }
    }
    s.state = parse_vars(sec, "state", vars);
    if (sec.find("outputs") != nullptr) {
        s.outputs = parse_vars(sec, "outputs", vars);
        s.output_map = parse_polys(sec, "output_map", vars);
    } else if (sec.find("output_map") != nullptr) {
        const auto& e = sec.at("output_map");
        throw KvError(e.line, e.column, "output_map needs outputs");
    }
    s.dynamics = parse_polys(sec, "dynamics", vars);
    s.initial_set = parse_polys(sec, "initial_set", vars);
    s.safe_region = parse_polys(sec, "safe_region", vars);
    if (sec.find("gain_a") != nullptr) {
        s.gain_a = sec.get_double("gain_a");
        if (!(*s.gain_a > 0.0)) {
            const auto& e = sec.at("gain_a");
            throw KvError(e.line, e.column, "gain_a must be positive");
        }
    }
    for (const auto& e : sec.entries) {
        if (!e.key.starts_with("inputs.")) {
            continue;
        }
        const std::string pid = e.key.substr(7);
        InputGroup g;
        g.parent = parse_id(pid, e.line);
        g.vars = parse_vars(sec, e.key, vars);
        if (sec.find("bounds." + pid) == nullptr) {
            throw KvError(e.line, e.column, "inputs." + pid + " needs bounds." + pid);
        }
        g.bounds = parse_polys(sec, "bounds." + pid, vars);
        s.inputs.push_back(std::move(g));
    }
    for (const auto& e : sec.entries) {
        if (e.key.starts_with("bounds.") && sec.find("inputs." + e.key.substr(7)) == nullptr) {
            throw KvError(e.line, e.column, e.key + " has no matching inputs key");
        }
    }
    return s;
}

Source parse_source(const KvSection& sec, int id, const VariableTable& vars) {
    no_bare(sec);
    sec.require_keys({"outputs", "set", "value"});
    Source s;
    s.id = id;
    s.outputs = parse_vars(sec, "outputs", vars);
    s.set = parse_polys(sec, "set", vars);
    if (sec.find("value") != nullptr) {
        s.value = sec.get_doubles("value");
    } else {
        s.value.assign(s.outputs.size(), 0.0);
    }
    return s;
}

std::optional<double> optional_double(const KvSection& sec, std::string_view key) {
    if (sec.get_string(key) == "auto") {
        return std::nullopt;
    }
    return sec.get_double(key);
}

} // namespace

void apply_config(const KvSection& sec, NegotiationConfig& cfg, SimulationSettings& sim) {
    no_bare(sec);
    auto& sc = cfg.synthesis;
    for (const auto& e : sec.entries) {
        const std::string& k = e.key;
        try {
            if (k == "epsilon") {
                sc.epsilon = sec.get_double(k);
            } else if (k == "gain_a") {
                sc.gain_a = sec.get_double(k);
            } else if (k == "h_degree") {
                sc.h_degree = static_cast<int>(sec.get_int(k));
            } else if (k == "sigma_degree") {
                sc.sigma_degree = static_cast<int>(sec.get_int(k));
            } else if (k == "degree_boost") {
                sc.degree_boost = static_cast<int>(sec.get_int(k));
            } else if (k == "bisection_tol") {
                sc.bisection_tol = sec.get_double(k);
            } else if (k == "delta_max") {
                sc.delta_max = optional_double(sec, k);
            } else if (k == "zeta_max") {
                sc.zeta_max = optional_double(sec, k);
            } else if (k == "localize_cbf") {
                sc.localize_cbf = sec.get_bool(k);
            } else if (k == "sigma_input_scope") {
                sc.sigma_input_scope = input_scope_from_string(sec.get_string(k));
            } else if (k == "normalize") {
                sc.normalize = sec.get_bool(k);
            } else if (k == "psd_tol") {
                sc.solver.psd_tol = sec.get_double(k);
            } else if (k == "gap_tol") {
                sc.solver.gap_tol = sec.get_double(k);
            } else if (k == "feas_tol") {
                sc.solver.feas_tol = sec.get_double(k);
            } else if (k == "max_iterations") {
                sc.solver.max_iterations = static_cast<int>(sec.get_int(k));
            } else if (k == "max_sdp_dimension") {
                sc.solver.max_dimension = static_cast<std::size_t>(sec.get_int(k));
            } else if (k == "residual_tol") {
                sc.extract.residual_tol = sec.get_double(k);
            } else if (k == "algorithm") {
                cfg.algorithm = algorithm_from_string(sec.get_string(k));
            } else if (k == "iteration_cap") {
                cfg.iteration_cap = static_cast<int>(sec.get_int(k));
            } else if (k == "selective_update") {
                cfg.selective_update = sec.get_bool(k);
            } else if (k == "parallel") {
                cfg.parallel = sec.get_bool(k);
            } else if (k == "degree_retry") {
                cfg.degree_retry = sec.get_bool(k);
            } else if (k == "sim_tol") {
                sim.sim_tol = sec.get_double(k);
            } else if (k == "horizon") {
                sim.horizon = sec.get_double(k);
            } else if (k == "samples") {
                sim.samples = static_cast<int>(sec.get_int(k));
            } else {
                throw KvError(e.line, e.column, "unknown config key '" + k + "'");
            }
        } catch (const std::invalid_argument& err) {
            throw KvError(e.line, e.column, err.what());
        }
    }
    sc.extract.psd_tol = sc.solver.psd_tol;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& err) {
        throw KvError(sec.line, 1, std::string("config: ") + err.what());
    }
    if (!(sim.sim_tol > 0.0) || sim.horizon < 0.0 || sim.samples < 0) {
        throw KvError(sec.line, 1, "config: invalid simulation settings");
    }
}

std::string model_hash(std::string_view text) { return fnv1a64_hex(text); }

ModelFile parse_model(std::string_view text) {
    const KvDocument doc = KvDocument::parse(text);
    ModelFile m;
    m.hash = model_hash(text);
    const KvSection& root = doc.root();
    if (!root.entries.empty()) {
        throw KvError(root.entries.front().line, 1, "entries must follow a section header");
    }
    no_bare(root);
    const KvSection* vars_sec = doc.find("variables");
    if (vars_sec == nullptr) {
        throw KvError(1, 1, "missing [variables] section");
    }
    no_bare(*vars_sec);
    vars_sec->require_keys({"names"});
    VariableTable& vars = m.system.variables;
    for (const auto& item : vars_sec->at("names").value.items) {
        if (!VariableTable::is_valid_name(item.text)) {
            throw KvError(item.line, item.column, "invalid variable name '" + item.text + "'");
        }
        if (vars.find(item.text)) {
            throw KvError(item.line, item.column, "variable '" + item.text + "' declared twice");
        }
        vars.intern(item.text);
    }
    bool saw_edges = false;
    int edges_line = 1;
    for (const auto& sec : doc.sections()) {
        if (sec.name.empty() || sec.name == "variables") {
            continue;
        }
        if (sec.name == "meta") {
            no_bare(sec);
            sec.require_keys({"name", "version"});
            if (sec.find("name") != nullptr) {
                m.name = sec.get_string("name");
            }
            if (sec.find("version") != nullptr) {
                m.version = sec.at("version").value.scalar.text;
            }
        } else if (sec.name.starts_with("subsystem.")) {
            const int id = parse_id(sec.name.substr(10), sec.line);
            m.system.subsystems[id] = parse_subsystem(sec, id, vars);
        } else if (sec.name.starts_with("source.")) {
            const int id = parse_id(sec.name.substr(7), sec.line);
            m.system.sources[id] = parse_source(sec, id, vars);
        } else if (sec.name == "edges") {
            saw_edges = true;
            edges_line = sec.line;
            if (!sec.entries.empty()) {
                throw KvError(sec.entries.front().line, 1, "edges are written as 'parent -> child'");
            }
            for (const auto& b : sec.bare) {
                const auto arrow = b.text.find("->");
                if (arrow == std::string::npos) {
                    throw KvError(b.line, 1, "expected 'parent -> child'");
                }
                const int p = parse_id(trim(std::string_view(b.text).substr(0, arrow)), b.line);
                const int c = parse_id(trim(std::string_view(b.text).substr(arrow + 2)), b.line);
                if (!m.system.edges.insert({p, c}).second) {
                    throw KvError(b.line, 1, "duplicate edge");
                }
            }
        } else if (sec.name == "config") {
            apply_config(sec, m.config, m.simulation);
        } else {
            throw KvError(sec.line, 1, "unknown section [" + sec.name + "]");
        }
    }
    if (m.system.subsystems.empty()) {
        throw KvError(1, 1, "model has no subsystems");
    }
    (void)saw_edges;
    const auto issues = validate_interconnection(m.system);
    if (!issues.empty()) {
        std::string msg = "invalid interconnection: " + issues.front();
        for (std::size_t i = 1; i < issues.size(); ++i) {
            msg += "; " + issues[i];
        }
        throw KvError(edges_line, 1, msg);
    }
    return m;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ModelFile load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

} // namespace agcv::app
