// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <span>
#include <utility>
#include <vector>

#include "agcv/poly/variables.hpp"

namespace agcv {

/// A power product stored sparsely as (variable, exponent) pairs sorted by id.
/// Zero exponents are never stored, so the empty monomial is the constant 1.
///
/// Ordering is graded: lower total degree first; within a degree, the monomial
/// with the larger exponent on the smallest variable id comes first. For
/// variables (x, y) this lists 1, x, y, x^2, x*y, y^2.
class Monomial {
  public:
    using Power = std::pair<VarId, unsigned>;

    Monomial() = default;
    explicit Monomial(std::vector<Power> powers);

    static Monomial variable(VarId var, unsigned exponent = 1);

    [[nodiscard]] unsigned degree() const { return degree_; }
    [[nodiscard]] unsigned exponent(VarId var) const;
    [[nodiscard]] bool is_constant() const { return powers_.empty(); }
    [[nodiscard]] const std::vector<Power>& powers() const { return powers_; }

    /// d/d(var): returns the exponent that came down and the reduced monomial.
    [[nodiscard]] std::pair<unsigned, Monomial> differentiate(VarId var) const;

    /// True when every variable of this monomial is contained in `vars`.
    [[nodiscard]] bool only_uses(std::span<const VarId> vars) const;

    friend Monomial operator*(const Monomial& a, const Monomial& b);
    friend bool operator==(const Monomial& a, const Monomial& b) = default;
    friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

  private:
    std::vector<Power> powers_;
    unsigned degree_ = 0;
};

/// All monomials in `vars` of total degree <= max_degree, in Monomial order.
std::vector<Monomial> monomial_basis(std::span<const VarId> vars, unsigned max_degree);

} // namespace agcv
