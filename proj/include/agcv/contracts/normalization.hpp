// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <vector>

#include "agcv/poly/polynomial.hpp"

namespace agcv {

/// Affine change of coordinates x = center + scale * z applied per variable,
/// keeping variable ids. Variables without an entry are left untouched.
struct Normalization {
    struct Axis {
        double center = 0.0;
        double scale = 1.0;
    };
    std::map<VarId, Axis> axes;

    [[nodiscard]] Axis axis(VarId v) const;
    /// p(center + scale * z), expressed in z
    [[nodiscard]] Polynomial to_normalized(const Polynomial& p) const;
    [[nodiscard]] PolynomialVector to_normalized(const PolynomialVector& p) const;
    /// p((x - center) / scale), expressed in x
    [[nodiscard]] Polynomial to_original(const Polynomial& p) const;
    /// Vector field in z for dx/dt = f(x): dz_k/dt = f_k(center + scale z) / scale_k.
    [[nodiscard]] PolynomialVector dynamics(const PolynomialVector& f, std::span<const VarId> state) const;
    [[nodiscard]] double to_normalized_value(VarId v, double x) const;
    [[nodiscard]] double to_original_value(VarId v, double z) const;

    void merge(const Normalization& other);
};

/// Shape of the superlevel set S = {x : min_c g_c(x) >= level}.
struct SetGeometry {
    std::vector<double> center;  ///< point of largest min_c g_c found by ascent
    std::vector<double> lower;   ///< axis extent below the center, per variable
    std::vector<double> upper;   ///< axis extent above the center
    double peak = 0.0;           ///< min_c g_c at the center
    bool bounded = true;
    bool empty = false;
};

struct GeometrySettings {
    int max_iterations = 500;
    double gradient_tol = 1e-10;
    double unbounded_radius = 1e6;
};

/// Projected Armijo ascent on min_c g_c from the origin, then per-axis
/// boundary search from the resulting center by doubling and bisection.
SetGeometry analyze_superlevel(const PolynomialVector& g, std::span<const VarId> vars, double level = 0.0,
                               const GeometrySettings& settings = {});

/// Normalization centering S and scaling each axis by its larger extent.
/// Unbounded, empty or degenerate axes keep scale 1.
Normalization normalization_for(const PolynomialVector& g, std::span<const VarId> vars, double level = 0.0);

/// Evaluation helper for points given per listed variable.
double min_over(const PolynomialVector& g, std::span<const VarId> vars, std::span<const double> point);

} // namespace agcv
