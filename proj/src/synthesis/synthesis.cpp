// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/synthesis/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "agcv/contracts/compatibility.hpp"
#include "agcv/contracts/local_model.hpp"
#include "agcv/poly/parse.hpp"
#include "agcv/sos/program.hpp"

namespace agcv {

std::string to_string(InputScope s) {
    switch (s) {
    case InputScope::Declared:
        return "declared";
    case InputScope::Inputs:
        return "inputs";
    case InputScope::Joint:
        return "joint";
    }
    return "declared";
}

InputScope input_scope_from_string(const std::string& s) {
    if (s == "declared") {
        return InputScope::Declared;
    }
    if (s == "inputs") {
        return InputScope::Inputs;
    }
    if (s == "joint") {
        return InputScope::Joint;
    }
    throw std::invalid_argument("unknown multiplier scope '" + s + "' (expected declared, inputs or joint)");
}

void SynthesisConfig::validate() const {
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("epsilon must be positive");
    }
    if (!(gain_a > 0.0)) {
        throw std::invalid_argument("gain_a must be positive");
    }
    if (h_degree < 0) {
        throw std::invalid_argument("h_degree must be non-negative");
    }
    if (sigma_degree < -1 || (sigma_degree >= 0 && sigma_degree % 2 != 0)) {
        throw std::invalid_argument("sigma_degree must be even (or -1 for the default rule)");
    }
    if (degree_boost < 0 || degree_boost % 2 != 0) {
        throw std::invalid_argument("degree_boost must be a non-negative even number");
    }
    if (!(bisection_tol > 0.0)) {
        throw std::invalid_argument("bisection_tol must be positive");
    }
    if ((delta_max && *delta_max < 0.0) || (zeta_max && *zeta_max < 0.0)) {
        throw std::invalid_argument("bracket overrides must be non-negative");
    }
}

std::vector<std::pair<std::string, std::string>> SynthesisConfig::snapshot() const {
    std::vector<std::pair<std::string, std::string>> out;
    out.emplace_back("epsilon", format_double(epsilon));
    out.emplace_back("gain_a", format_double(gain_a));
    out.emplace_back("h_degree", std::to_string(h_degree));
    out.emplace_back("sigma_degree", std::to_string(sigma_degree));
    out.emplace_back("degree_boost", std::to_string(degree_boost));
    out.emplace_back("bisection_tol", format_double(bisection_tol));
    out.emplace_back("delta_max", delta_max ? format_double(*delta_max) : "auto");
    out.emplace_back("zeta_max", zeta_max ? format_double(*zeta_max) : "auto");
    out.emplace_back("localize_cbf", localize_cbf ? "true" : "false");
    out.emplace_back("sigma_input_scope", to_string(sigma_input_scope));
    out.emplace_back("normalize", normalize ? "true" : "false");
    out.emplace_back("psd_tol", format_double(solver.psd_tol));
    out.emplace_back("gap_tol", format_double(solver.gap_tol));
    out.emplace_back("feas_tol", format_double(solver.feas_tol));
    out.emplace_back("max_iterations", std::to_string(solver.max_iterations));
    out.emplace_back("max_sdp_dimension", std::to_string(solver.max_dimension));
    out.emplace_back("residual_tol", format_double(extract.residual_tol));
    return out;
}

namespace {

enum class ProgramKind { Feasibility, Scalar };

// center of X0 and the center moved by each axis extent
std::vector<std::vector<double>> initial_sample_points(const Subsystem& s) {
    const SetGeometry geo = analyze_superlevel(s.initial_set, s.state);
    std::vector<std::vector<double>> points{geo.center};
    if (!geo.empty) {
        for (std::size_t k = 0; k < s.state.size(); ++k) {
            for (const double t : {geo.upper[k], -geo.lower[k]}) {
                if (std::isfinite(t)) {
                    auto p = geo.center;
                    p[k] += t;
                    points.push_back(std::move(p));
                }
            }
        }
    }
    return points;
}

struct Setup {
    const Subsystem& sub;
    const SynthesisConfig& cfg;
    Normalization norm;
    LocalModel model;

    /// points of X0 found by the geometry pass; a certificate puts them in {q >= offset + zeta}
    std::vector<std::vector<double>> x0_points;

    Setup(const Subsystem& s, const SynthesisConfig& c)
        : sub(s), cfg(c), norm(subsystem_normalization(s, c.normalize)), model(local_model(s, norm)) {
        for (auto& p : initial_sample_points(s)) {
            if (min_over(s.initial_set, s.state, p) >= 0.0) {
                x0_points.push_back(std::move(p));
            }
        }
    }

    /// Necessary condition checked before any solve. It also keeps the
    /// localized barrier condition from holding vacuously on an empty region.
    [[nodiscard]] bool initial_set_fits(double level) const {
        return std::ranges::all_of(x0_points, [&](const std::vector<double>& p) {
            return min_over(sub.safe_region, sub.state, p) >= level;
        });
    }

    [[nodiscard]] unsigned multiplier(int constraint, int multiplicand) const {
        if (cfg.sigma_degree >= 0) {
            return static_cast<unsigned>(cfg.sigma_degree + cfg.degree_boost);
        }
        return multiplier_degree(constraint, multiplicand);
    }

    [[nodiscard]] sos::SosProgram build(double delta, double zeta, double offset, ProgramKind kind) const {
        const LocalModel& m = model;
        sos::SosProgram prog;
        const int hd = (cfg.h_degree > 0 ? cfg.h_degree : std::max(1, max_degree(m.safe_region))) + cfg.degree_boost;
        const sos::LinearExpr h = prog.new_free("h", m.state, static_cast<unsigned>(hd));

        for (std::size_t c = 0; c < m.initial_set.size(); ++c) {
            const auto s = prog.new_sos("s_init." + std::to_string(c), m.state,
                                        multiplier(hd, m.initial_set[c].degree()));
            prog.add_sos("init." + std::to_string(c), h - s * sos::LinearExpr(m.initial_set[c]), m.state);
        }
        const double level = offset + zeta;
        for (std::size_t c = 0; c < m.safe_region.size(); ++c) {
            const auto s = prog.new_sos("s_safe." + std::to_string(c), m.state,
                                        multiplier(hd, m.safe_region[c].degree()));
            prog.add_sos("safe." + std::to_string(c),
                         -h + s * sos::LinearExpr(m.safe_region[c] - Polynomial(level)), m.state);
        }

        std::vector<VarId> all = m.state;
        all.insert(all.end(), m.inputs.begin(), m.inputs.end());
        const int cbf_degree = std::max(hd - 1 + max_degree(m.dynamics), hd);
        sos::LinearExpr cbf = sos::gradient_dot(h, m.state, m.dynamics) + h * cfg.gain_for(sub) -
                              sos::LinearExpr(cfg.epsilon);
        bool joint = cfg.sigma_input_scope == InputScope::Joint ||
                     (cfg.sigma_input_scope == InputScope::Declared && kind == ProgramKind::Feasibility);
        for (const auto& g : m.groups) {
            for (std::size_t c = 0; c < g.bounds.size(); ++c) {
                const auto s = prog.new_sos("s_in." + std::to_string(g.parent) + "." + std::to_string(c),
                                            joint ? all : g.vars, multiplier(cbf_degree, g.bounds[c].degree()));
                cbf -= s * sos::LinearExpr(g.bounds[c] - Polynomial(delta));
            }
        }
        if (cfg.localize_cbf) {
            for (std::size_t c = 0; c < m.safe_region.size(); ++c) {
                const auto s = prog.new_sos("s_loc." + std::to_string(c), m.state,
                                            multiplier(cbf_degree, m.safe_region[c].degree()));
                cbf -= s * sos::LinearExpr(m.safe_region[c] - Polynomial(offset));
            }
        }
        prog.add_sos("cbf", std::move(cbf), all);
        return prog;
    }

    [[nodiscard]] sos::ProgramResult solve(double delta, double zeta, double offset, ProgramKind kind) const {
        if (!initial_set_fits(offset + zeta)) {
            sos::ProgramResult r;
            r.status = sdp::Status::Infeasible;
            return r;
        }
        return sos::solve(build(delta, zeta, offset, kind), cfg.solver, cfg.extract);
    }

    [[nodiscard]] Contract contract(const sos::ProgramResult& r, double delta, double zeta, double offset) const {
        Contract c;
        c.subsystem = sub.id;
        c.delta = delta;
        c.zeta = zeta;
        c.safe_offset = offset;
        c.gain_a = cfg.gain_for(sub);
        c.epsilon = cfg.epsilon;
        c.localized = cfg.localize_cbf;
        c.normalization = norm;
        c.evidence = ProgramEvidence::from(r.extraction);
        c.barrier = norm.to_original(c.evidence.polynomials.at("h"));
        return c;
    }
};

ScalarSearch from_bisection(const sos::BisectionResult& b, double lo, double hi, const std::string& what) {
    ScalarSearch out;
    out.outcome = b.outcome;
    out.lo = lo;
    out.hi = hi;
    out.probes = static_cast<int>(b.probes.size());
    out.feasible = b.outcome == sos::BisectionOutcome::Found;
    out.value = b.feasible_end;
    if (b.outcome == sos::BisectionOutcome::Infeasible) {
        out.reason = what + " infeasible at the feasible-side bracket endpoint " + format_double(b.infeasible_end);
    } else if (b.outcome == sos::BisectionOutcome::Inconsistent) {
        out.reason = what + " feasibility is not monotone on [" + format_double(lo) + ", " + format_double(hi) + "]";
    }
    return out;
}

void check_scalar(double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite and non-negative");
    }
}

} // namespace

LocalResult local_feasibility(const Subsystem& s, double delta, double zeta, const SynthesisConfig& cfg,
                              double safe_offset) {
    cfg.validate();
    check_scalar(delta, "delta");
    check_scalar(zeta, "zeta");
    check_scalar(safe_offset, "safe offset");
    const Setup setup(s, cfg);
    const auto r = setup.solve(delta, zeta, safe_offset, ProgramKind::Feasibility);
    LocalResult out;
    out.status = r.status;
    if (r.feasible()) {
        out.contract = setup.contract(r, delta, zeta, safe_offset);
    }
    return out;
}

double delta_upper_bound(const Subsystem& s, const SynthesisConfig& cfg) {
    if (cfg.delta_max) {
        return *cfg.delta_max;
    }
    double top = 0.0;
    for (const auto& g : s.inputs) {
        const SetGeometry geo = analyze_superlevel(g.bounds, g.vars);
        if (std::isfinite(geo.peak)) {
            top = std::max(top, geo.peak);
        }
    }
    return 2.0 * top;
}

double zeta_upper_bound(const Subsystem& s, double safe_offset, const SynthesisConfig& cfg) {
    if (cfg.zeta_max) {
        return *cfg.zeta_max;
    }
    const auto points = initial_sample_points(s);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
        best = std::min(best, min_over(s.safe_region, s.state, p) - safe_offset);
    }
    return std::isfinite(best) ? std::max(0.0, best) : 0.0;
}

ScalarSearch maximal_internal_input_set(const Subsystem& s, double zeta, const SynthesisConfig& cfg,
                                        double safe_offset) {
    cfg.validate();
    check_scalar(zeta, "zeta");
    check_scalar(safe_offset, "safe offset");
    const Setup setup(s, cfg);
    const double hi = delta_upper_bound(s, cfg);
    const auto b = sos::bisect_scalar(
        [&](double delta) { return setup.solve(delta, zeta, safe_offset, ProgramKind::Scalar); },
        sos::Direction::MinimizeFindSmallestFeasible, 0.0, hi, cfg.bisection_tol);
    ScalarSearch out = from_bisection(b, 0.0, hi, "input-set program");
    if (out.feasible) {
        out.contract = setup.contract(b.certificate, out.value, zeta, safe_offset);
    }
    return out;
}

ScalarSearch minimal_safe_region(const Subsystem& s, double delta, const SynthesisConfig& cfg, double safe_offset) {
    cfg.validate();
    check_scalar(delta, "delta");
    check_scalar(safe_offset, "safe offset");
    const Setup setup(s, cfg);
    const double hi = zeta_upper_bound(s, safe_offset, cfg);
    const auto b = sos::bisect_scalar(
        [&](double zeta) { return setup.solve(delta, zeta, safe_offset, ProgramKind::Scalar); },
        sos::Direction::MaximizeFindLargestFeasible, 0.0, hi, cfg.bisection_tol);
    ScalarSearch out = from_bisection(b, 0.0, hi, "safe-region program");
    if (out.feasible) {
        out.contract = setup.contract(b.certificate, delta, out.value, safe_offset);
    } else if (b.outcome == sos::BisectionOutcome::Infeasible) {
        out.reason += " (delta below the smallest feasible delta?)";
    }
    return out;
}

ScalarSearch update_safe_region(const Subsystem& s, const std::vector<ChildAssumption>& children,
                                double current_offset, const SynthesisConfig& cfg) {
    cfg.validate();
    check_scalar(current_offset, "safe offset");
    ScalarSearch out;
    out.lo = out.hi = out.value = current_offset;
    if (children.empty()) {
        out.feasible = true;
        out.outcome = sos::BisectionOutcome::Found;
        return out;
    }
    Normalization norm;
    if (cfg.normalize) {
        norm = normalization_for(s.safe_region, s.state);
    }
    const PolynomialVector q = norm.to_normalized(s.safe_region);
    std::map<VarId, Polynomial> out_map;
    for (std::size_t k = 0; k < s.outputs.size(); ++k) {
        out_map.emplace(s.outputs[k], s.output_map[k]);
    }
    struct Pulled {
        SubsystemId child;
        Polynomial p;
        double delta;
    };
    std::vector<Pulled> pulled;
    for (const auto& ch : children) {
        for (const auto& d : ch.bounds) {
            pulled.push_back({ch.child, norm.to_normalized(compose(d, out_map)), ch.delta});
        }
    }
    const SetGeometry geo = analyze_superlevel(s.safe_region, s.state);
    const double peak = geo.peak;
    const double hi = std::max(current_offset, peak + cfg.bisection_tol);
    auto probe = [&](double offset) {
        sos::SosProgram prog;
        for (std::size_t i = 0; i < pulled.size(); ++i) {
            sos::LinearExpr e = pulled[i].p - Polynomial(pulled[i].delta);
            for (std::size_t r = 0; r < q.size(); ++r) {
                const int deg = std::max(pulled[i].p.degree(), q[r].degree());
                unsigned sd = cfg.sigma_degree >= 0 ? static_cast<unsigned>(cfg.sigma_degree)
                                                    : multiplier_degree(deg, q[r].degree());
                sd += static_cast<unsigned>(cfg.degree_boost);
                const auto sig = prog.new_sos("s_upd." + std::to_string(i) + "." + std::to_string(r), s.state, sd);
                e -= sig * sos::LinearExpr(q[r] - Polynomial(offset));
            }
            prog.add_sos("update." + std::to_string(pulled[i].child) + "." + std::to_string(i), std::move(e),
                         s.state);
        }
        return sos::solve(prog, cfg.solver, cfg.extract);
    };
    const auto b = sos::bisect_scalar(probe, sos::Direction::MinimizeFindSmallestFeasible, current_offset, hi,
                                      cfg.bisection_tol);
    out = from_bisection(b, current_offset, hi, "safe-region update");
    if (out.feasible && out.value >= peak) {
        out.feasible = false;
        out.reason = "safe-region update empties the safe region (offset " + format_double(out.value) +
                     " >= peak " + format_double(peak) + ")";
    }
    return out;
}

} // namespace agcv
