// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/checker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "agcv/contracts/compatibility.hpp"
#include "agcv/contracts/local_model.hpp"
#include "agcv/poly/parse.hpp"
#include "agcv/sdp/eigen.hpp"

namespace agcv {

namespace {

std::string fmt(double v) { return format_double(v); }

class Context {
  public:
    Context(std::string where, const CheckSettings& settings, CheckReport& report)
        : where_(std::move(where)), settings_(settings), report_(report) {}

    void require(bool ok, const std::string& what) {
        ++report_.checks;
        if (!ok) {
            report_.failures.push_back(where_ + ": " + what);
        }
    }

    Polynomial poly(const ProgramEvidence& ev, const std::string& name, bool required) {
        const auto it = ev.polynomials.find(name);
        if (it == ev.polynomials.end()) {
            // an absent multiplier is the zero polynomial, which is SOS
            require(!required, "missing polynomial " + name);
            return {};
        }
        return it->second;
    }

    // expression == z^T Q z with Q PSD
    void identity(const ProgramEvidence& ev, const std::string& label, const Polynomial& expr) {
        const sos::GramEvidence* g = ev.gram(label);
        if (g == nullptr) {
            require(false, "missing Gram matrix for " + label);
            return;
        }
        gram_psd(*g);
        const double r = max_coefficient_difference(expr, sos::expand_gram(g->basis, g->gram));
        require(r <= settings_.residual_tol, label + " identity residual " + fmt(r) + " exceeds " +
                                                 fmt(settings_.residual_tol));
    }

    // stored multiplier equals its own Gram expansion and is PSD
    void multiplier(const ProgramEvidence& ev, const std::string& name) {
        const auto it = ev.polynomials.find(name);
        if (it == ev.polynomials.end()) {
            return;
        }
        identity(ev, name, it->second);
    }

    void gram_psd(const sos::GramEvidence& g) {
        if (g.gram.rows() != static_cast<Eigen::Index>(g.basis.size()) || g.gram.cols() != g.gram.rows()) {
            require(false, g.label + " Gram matrix has the wrong shape");
            return;
        }
        try {
            const double m = g.gram.rows() > 0 ? sdp::min_eigenvalue(g.gram) : 0.0;
            require(m >= -settings_.psd_tol, g.label + " Gram min eigenvalue " + fmt(m));
        } catch (const std::exception& e) {
            require(false, g.label + " Gram matrix: " + e.what());
        }
    }

    const CheckSettings& settings() const { return settings_; }

  private:
    std::string where_;
    const CheckSettings& settings_;
    CheckReport& report_;
};

/// Draws points of a set {min_c g_c >= 0} by rejection from its bounding box.
class Sampler {
  public:
    Sampler(std::uint64_t seed, int max_draws) : rng_(seed), max_draws_(max_draws) {}

    /// Calls `visit` on up to `count` points; returns how many were visited.
    int sample(const std::vector<VarId>& vars, const PolynomialVector& set, int count,
               const std::function<void(const std::unordered_map<VarId, double>&)>& visit) {
        if (set.empty()) {
            return 0;
        }
        const SetGeometry geo = analyze_superlevel(set, vars);
        if (geo.empty || !geo.bounded) {
            return 0;
        }
        std::unordered_map<VarId, double> pt;
        auto inside = [&] {
            for (const auto& g : set) {
                if (evaluate(g, pt) < 0.0) {
                    return false;
                }
            }
            return true;
        };
        for (std::size_t k = 0; k < vars.size(); ++k) {
            pt[vars[k]] = geo.center[k];
        }
        int visited = 0;
        if (inside()) {
            visit(pt);
            ++visited;
        }
        std::vector<std::uniform_real_distribution<double>> dist;
        bool flat = true;
        for (std::size_t k = 0; k < vars.size(); ++k) {
            dist.emplace_back(geo.center[k] - geo.lower[k], geo.center[k] + geo.upper[k]);
            flat = flat && geo.lower[k] + geo.upper[k] <= 0.0;
        }
        if (flat) {
            return visited;
        }
        for (int draw = 0; draw < max_draws_ && visited < count; ++draw) {
            for (std::size_t k = 0; k < vars.size(); ++k) {
                pt[vars[k]] = dist[k](rng_);
            }
            if (inside()) {
                visit(pt);
                ++visited;
            }
        }
        return visited;
    }

    /// Points of a product of sets over disjoint variable lists.
    int sample_product(const std::vector<std::pair<std::vector<VarId>, PolynomialVector>>& factors, int count,
                       const std::function<void(const std::unordered_map<VarId, double>&)>& visit) {
        std::vector<std::vector<std::unordered_map<VarId, double>>> pools;
        for (const auto& [vars, set] : factors) {
            std::vector<std::unordered_map<VarId, double>> pool;
            sample(vars, set, count, [&](const auto& p) { pool.push_back(p); });
            if (pool.empty()) {
                return 0;
            }
            pools.push_back(std::move(pool));
        }
        for (int i = 0; i < count; ++i) {
            std::unordered_map<VarId, double> pt;
            for (const auto& pool : pools) {
                std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
                const auto& p = pool[pick(rng_)];
                pt.insert(p.begin(), p.end());
            }
            visit(pt);
        }
        return count;
    }

  private:
    std::mt19937_64 rng_;
    int max_draws_;
};

PolynomialVector shifted(const PolynomialVector& p, double by) {
    PolynomialVector out = p;
    for (auto& q : out) {
        q -= Polynomial(by);
    }
    return out;
}

} // namespace

void check_contract(const Contract& c, const Subsystem& s, const CheckSettings& settings, CheckReport& report) {
    Context ctx("contract " + std::to_string(c.subsystem), settings, report);
    ctx.require(c.delta >= 0.0 && c.zeta >= 0.0 && c.safe_offset >= 0.0, "negative delta, zeta or safe offset");
    ctx.require(c.gain_a > 0.0 && c.epsilon > 0.0, "gain and epsilon must be positive");
    for (const auto& [v, a] : c.normalization.axes) {
        ctx.require(a.scale > 0.0 && std::isfinite(a.center), "invalid normalization axis");
    }
    const ProgramEvidence& ev = c.evidence;
    const Polynomial h = ctx.poly(ev, "h", true);
    const auto hv = h.variables();
    ctx.require(std::all_of(hv.begin(), hv.end(),
                            [&](VarId v) { return std::find(s.state.begin(), s.state.end(), v) != s.state.end(); }),
                "barrier uses variables outside the state");
    const Polynomial back = c.normalization.to_original(h);
    const double scale = std::max(1.0, c.barrier.max_abs_coefficient());
    ctx.require(max_coefficient_difference(back, c.barrier) <= 1e-6 * scale,
                "stored barrier does not match the normalized barrier");

    const LocalModel m = local_model(s, c.normalization);
    for (std::size_t k = 0; k < m.initial_set.size(); ++k) {
        const std::string mult = "s_init." + std::to_string(k);
        ctx.identity(ev, "init." + std::to_string(k), h - ctx.poly(ev, mult, false) * m.initial_set[k]);
        ctx.multiplier(ev, mult);
    }
    const double level = c.safe_offset + c.zeta;
    for (std::size_t k = 0; k < m.safe_region.size(); ++k) {
        const std::string mult = "s_safe." + std::to_string(k);
        ctx.identity(ev, "safe." + std::to_string(k),
                     Polynomial() - h + ctx.poly(ev, mult, false) * (m.safe_region[k] - Polynomial(level)));
        ctx.multiplier(ev, mult);
    }
    const PolynomialVector grad = gradient(h, m.state);
    Polynomial flow;
    for (std::size_t k = 0; k < m.state.size(); ++k) {
        flow += grad[k] * m.dynamics[k];
    }
    Polynomial cbf = flow + h * c.gain_a - Polynomial(c.epsilon);
    std::vector<std::string> mults;
    for (const auto& g : m.groups) {
        for (std::size_t k = 0; k < g.bounds.size(); ++k) {
            const std::string mult = "s_in." + std::to_string(g.parent) + "." + std::to_string(k);
            cbf -= ctx.poly(ev, mult, false) * (g.bounds[k] - Polynomial(c.delta));
            mults.push_back(mult);
        }
    }
    if (c.localized) {
        for (std::size_t k = 0; k < m.safe_region.size(); ++k) {
            const std::string mult = "s_loc." + std::to_string(k);
            cbf -= ctx.poly(ev, mult, false) * (m.safe_region[k] - Polynomial(c.safe_offset));
            mults.push_back(mult);
        }
    }
    ctx.identity(ev, "cbf", cbf);
    for (const auto& mult : mults) {
        ctx.multiplier(ev, mult);
    }

    // Sampled consequences, all in normalized coordinates.
    Sampler sampler(settings.seed ^ static_cast<std::uint64_t>(c.subsystem), settings.max_draws);
    const double margin = -settings.sample_margin;
    double worst = 0.0;
    sampler.sample(m.state, m.initial_set, settings.samples,
                   [&](const auto& pt) { worst = std::min(worst, evaluate(h, pt)); });
    ctx.require(worst >= margin, "sampled barrier on the initial set reaches " + fmt(worst));

    worst = 0.0;
    sampler.sample(m.state, PolynomialVector{h}, settings.samples, [&](const auto& pt) {
        for (const auto& q : m.safe_region) {
            worst = std::min(worst, evaluate(q, pt) - level);
        }
    });
    ctx.require(worst >= margin, "sampled safe-region margin on {h >= 0} reaches " + fmt(worst));

    worst = 0.0;
    std::vector<std::pair<std::vector<VarId>, PolynomialVector>> factors;
    factors.emplace_back(m.state, c.localized ? shifted(m.safe_region, c.safe_offset) : m.safe_region);
    for (const auto& g : m.groups) {
        factors.emplace_back(g.vars, shifted(g.bounds, c.delta));
    }
    const Polynomial cond = flow + h * c.gain_a;
    sampler.sample_product(factors, settings.samples,
                           [&](const auto& pt) { worst = std::min(worst, evaluate(cond, pt)); });
    ctx.require(worst >= margin, "sampled barrier condition reaches " + fmt(worst));
}

void check_edge(const EdgeEvidence& e, const Interconnection& sys, const Certificate& cert,
                const CheckSettings& settings, CheckReport& report) {
    Context ctx("edge " + std::to_string(e.parent) + " -> " + std::to_string(e.child), settings, report);
    if (!sys.edges.contains({e.parent, e.child}) || !sys.subsystems.contains(e.child)) {
        ctx.require(false, "edge is not part of the model");
        return;
    }
    const Subsystem& child = sys.subsystems.at(e.child);
    const auto child_contract = cert.contracts.find(e.child);
    if (child_contract != cert.contracts.end()) {
        ctx.require(e.delta >= child_contract->second.delta - 1e-12,
                    "evidence delta " + fmt(e.delta) + " is below the child's delta " +
                        fmt(child_contract->second.delta));
    }
    PolynomialVector d;
    PolynomialVector mults;
    std::vector<VarId> vars;
    bool per_component = true;
    if (sys.is_source(e.parent)) {
        const Source& src = sys.sources.at(e.parent);
        ctx.require(e.via == "source", "source edge must use the source set");
        d = e.normalization.to_normalized(child.input_from(src.id)->bounds);
        mults = e.normalization.to_normalized(src.set);
        vars = src.outputs;
    } else {
        const Subsystem& parent = sys.subsystems.at(e.parent);
        const auto pc = cert.contracts.find(e.parent);
        if (pc == cert.contracts.end()) {
            ctx.require(false, "no contract for the parent");
            return;
        }
        d = e.normalization.to_normalized(composed_bounds(parent, child));
        vars = parent.state;
        if (e.via == "barrier") {
            for (const VarId v : parent.state) {
                const auto a = e.normalization.axis(v);
                const auto b = pc->second.normalization.axis(v);
                ctx.require(a.center == b.center && a.scale == b.scale,
                            "edge coordinates differ from the parent contract's");
            }
            mults.push_back(ctx.poly(pc->second.evidence, "h", true));
            per_component = false;
        } else if (e.via == "region") {
            mults = e.normalization.to_normalized(pc->second.guarantee_region(parent));
        } else {
            ctx.require(false, "unknown evidence kind '" + e.via + "'");
            return;
        }
    }
    for (std::size_t c = 0; c < d.size(); ++c) {
        Polynomial expr = d[c] - Polynomial(e.delta);
        for (std::size_t r = 0; r < mults.size(); ++r) {
            const std::string name = "s_edge." + std::to_string(c) + (per_component ? "." + std::to_string(r) : "");
            expr -= ctx.poly(e.evidence, name, false) * mults[r];
            ctx.multiplier(e.evidence, name);
        }
        ctx.identity(e.evidence, "edge." + std::to_string(c), expr);
    }
    Sampler sampler(settings.seed ^ (static_cast<std::uint64_t>(e.parent) << 20U) ^
                        static_cast<std::uint64_t>(e.child),
                    settings.max_draws);
    double worst = 0.0;
    sampler.sample(vars, mults, settings.samples, [&](const auto& pt) {
        for (const auto& dc : d) {
            worst = std::min(worst, evaluate(dc, pt) - e.delta);
        }
    });
    ctx.require(worst >= -settings.sample_margin, "sampled implication margin reaches " + fmt(worst));
}

CheckReport check_certificate(const Certificate& cert, const Interconnection& sys, const CheckSettings& settings) {
    CheckReport report;
    Context ctx("certificate", settings, report);
    for (const auto& [id, c] : cert.contracts) {
        if (!sys.subsystems.contains(id)) {
            ctx.require(false, "contract for unknown subsystem " + std::to_string(id));
            continue;
        }
        check_contract(c, sys.subsystems.at(id), settings, report);
    }
    for (const auto& e : cert.edges) {
        check_edge(e, sys, cert, settings, report);
    }
    if (cert.verdict) {
        for (const auto& [id, s] : sys.subsystems) {
            ctx.require(cert.contracts.contains(id), "verdict True without a contract for subsystem " +
                                                         std::to_string(id));
        }
        for (const auto& [p, c] : sys.edges) {
            const bool found = std::any_of(cert.edges.begin(), cert.edges.end(),
                                           [&](const EdgeEvidence& e) { return e.parent == p && e.child == c; });
            ctx.require(found, "verdict True without evidence for edge " + std::to_string(p) + " -> " +
                                   std::to_string(c));
        }
    }
    return report;
}

} // namespace agcv
