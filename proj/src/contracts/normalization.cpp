// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace agcv {

Normalization::Axis Normalization::axis(VarId v) const {
    const auto it = axes.find(v);
    return it == axes.end() ? Axis{} : it->second;
}

Polynomial Normalization::to_normalized(const Polynomial& p) const {
    std::map<VarId, Polynomial> sub;
    for (const auto& [v, a] : axes) {
        sub.emplace(v, Polynomial(a.center) + Polynomial::variable(v) * a.scale);
    }
    return substitute(p, sub);
}

PolynomialVector Normalization::to_normalized(const PolynomialVector& p) const {
    PolynomialVector out;
    out.reserve(p.size());
    for (const auto& q : p) {
        out.push_back(to_normalized(q));
    }
    return out;
}

Polynomial Normalization::to_original(const Polynomial& p) const {
    std::map<VarId, Polynomial> sub;
    for (const auto& [v, a] : axes) {
        sub.emplace(v, (Polynomial::variable(v) - Polynomial(a.center)) * (1.0 / a.scale));
    }
    return substitute(p, sub);
}

PolynomialVector Normalization::dynamics(const PolynomialVector& f, std::span<const VarId> state) const {
    if (f.size() != state.size()) {
        throw std::invalid_argument("Normalization::dynamics: dimension mismatch");
    }
    PolynomialVector out;
    for (std::size_t k = 0; k < f.size(); ++k) {
        out.push_back(to_normalized(f[k]) * (1.0 / axis(state[k]).scale));
    }
    return out;
}

double Normalization::to_normalized_value(VarId v, double x) const {
    const Axis a = axis(v);
    return (x - a.center) / a.scale;
}

double Normalization::to_original_value(VarId v, double z) const {
    const Axis a = axis(v);
    return a.center + a.scale * z;
}

void Normalization::merge(const Normalization& other) {
    for (const auto& [v, a] : other.axes) {
        axes[v] = a;
    }
}

double min_over(const PolynomialVector& g, std::span<const VarId> vars, std::span<const double> point) {
    std::unordered_map<VarId, double> at;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        at[vars[k]] = point[k];
    }
    double m = std::numeric_limits<double>::infinity();
    for (const auto& p : g) {
        m = std::min(m, evaluate(p, at));
    }
    return m;
}

namespace {

struct Objective {
    const PolynomialVector& g;
    std::span<const VarId> vars;
    std::vector<PolynomialVector> grads;

    Objective(const PolynomialVector& gs, std::span<const VarId> vs) : g(gs), vars(vs) {
        for (const auto& p : g) {
            grads.push_back(gradient(p, vars));
        }
    }

    double value(std::span<const double> x) const { return min_over(g, vars, x); }

    // gradient of the active (smallest) component
    std::vector<double> ascent(std::span<const double> x) const {
        std::size_t active = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double v = min_over(PolynomialVector{g[c]}, vars, x);
            if (v < best) {
                best = v;
                active = c;
            }
        }
        std::vector<double> d(vars.size());
        for (std::size_t k = 0; k < vars.size(); ++k) {
            d[k] = min_over(PolynomialVector{grads[active][k]}, vars, x);
        }
        return d;
    }
};

// Largest t in (0, limit) with value(center + t * dir) >= level, assuming it
// holds at t = 0. Returns +inf when the set extends past `limit`.
double boundary_distance(const Objective& f, const std::vector<double>& center, std::size_t axis, double sign,
                         double level, double limit) {
    std::vector<double> x = center;
    auto inside = [&](double t) {
        x[axis] = center[axis] + sign * t;
        return f.value(x) >= level;
    };
    double hi = 1e-3;
    while (inside(hi)) {
        if (hi > limit) {
            return std::numeric_limits<double>::infinity();
        }
        hi *= 2.0;
    }
    double lo = 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

SetGeometry analyze_superlevel(const PolynomialVector& g, std::span<const VarId> vars, double level,
                               const GeometrySettings& settings) {
    if (g.empty()) {
        throw std::invalid_argument("analyze_superlevel: no polynomials");
    }
    const Objective f(g, vars);
    const std::size_t n = vars.size();
    SetGeometry out;
    std::vector<double> x(n, 0.0);
    double fx = f.value(x);
    for (int it = 0; it < settings.max_iterations; ++it) {
        const auto d = f.ascent(x);
        double norm2 = 0.0;
        for (const double v : d) {
            norm2 += v * v;
        }
        if (norm2 <= settings.gradient_tol * settings.gradient_tol) {
            break;
        }
        double t = 1.0;
        bool moved = false;
        std::vector<double> trial(n);
        for (int back = 0; back < 60; ++back, t *= 0.5) {
            for (std::size_t k = 0; k < n; ++k) {
                trial[k] = x[k] + t * d[k];
            }
            const double ft = f.value(trial);
            if (ft >= fx + 1e-4 * t * norm2) {
                moved = ft > fx;
                x = trial;
                fx = ft;
                break;
            }
        }
        if (!moved) {
            break;
        }
        double radius = 0.0;
        for (const double v : x) {
            radius = std::max(radius, std::abs(v));
        }
        if (radius > settings.unbounded_radius) {
            out.bounded = false;
            break;
        }
    }
    out.center = x;
    out.peak = fx;
    out.lower.assign(n, 0.0);
    out.upper.assign(n, 0.0);
    if (fx < level) {
        out.empty = true;
        return out;
    }
    for (std::size_t k = 0; k < n; ++k) {
        out.upper[k] = boundary_distance(f, x, k, 1.0, level, settings.unbounded_radius);
        out.lower[k] = boundary_distance(f, x, k, -1.0, level, settings.unbounded_radius);
        if (!std::isfinite(out.upper[k]) || !std::isfinite(out.lower[k])) {
            out.bounded = false;
        }
    }
    return out;
}

Normalization normalization_for(const PolynomialVector& g, std::span<const VarId> vars, double level) {
    const SetGeometry geo = analyze_superlevel(g, vars, level);
    Normalization out;
    for (std::size_t k = 0; k < vars.size(); ++k) {
        Normalization::Axis a;
        if (!geo.empty && std::isfinite(geo.center[k]) && std::abs(geo.center[k]) < 1e6) {
            a.center = geo.center[k];
        }
        const double extent = std::max(geo.lower[k], geo.upper[k]);
        if (!geo.empty && std::isfinite(extent) && extent > 1e-9) {
            a.scale = extent;
        }
        out.axes[vars[k]] = a;
    }
    return out;
}

} // namespace agcv
