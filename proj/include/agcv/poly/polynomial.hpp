// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "agcv/poly/monomial.hpp"

namespace agcv {

/// Sparse multivariate polynomial with double coefficients. Terms live in a
/// map keyed by Monomial, so iteration follows the canonical graded order and
/// zero coefficients are never stored.
class Polynomial {
  public:
    using TermMap = std::map<Monomial, double>;

    Polynomial() = default;
    Polynomial(double constant); // NOLINT(google-explicit-constructor)
    Polynomial(const Monomial& m, double coefficient = 1.0);

    static Polynomial variable(VarId var) { return Polynomial(Monomial::variable(var)); }

    [[nodiscard]] const TermMap& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] int degree() const; // -1 for the zero polynomial
    [[nodiscard]] double coefficient(const Monomial& m) const;
    [[nodiscard]] double constant_term() const { return coefficient(Monomial{}); }
    [[nodiscard]] std::vector<VarId> variables() const;
    [[nodiscard]] double max_abs_coefficient() const;

    /// Adds c*m in place, dropping the term if it cancels to exactly zero.
    void add_term(const Monomial& m, double c);

    Polynomial& operator+=(const Polynomial& other);
    Polynomial& operator-=(const Polynomial& other);
    Polynomial& operator*=(double s);

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
    friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
    friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend bool operator==(const Polynomial& a, const Polynomial& b) = default;

  private:
    TermMap terms_;
};

using PolynomialVector = std::vector<Polynomial>;

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial pow(const Polynomial& p, unsigned exponent);

/// Point given densely by variable id; must cover every variable of p.
double evaluate(const Polynomial& p, std::span<const double> point);
/// Point given by id -> value; throws std::out_of_range on a missing variable.
double evaluate(const Polynomial& p, const std::unordered_map<VarId, double>& point);

Polynomial derivative(const Polynomial& p, VarId var);
PolynomialVector gradient(const Polynomial& p, std::span<const VarId> vars);

/// Replaces every variable of p by its image; throws std::out_of_range when a
/// variable of p has no entry.
Polynomial compose(const Polynomial& p, const std::map<VarId, Polynomial>& substitution);
/// Like compose, but variables without an entry are left in place.
Polynomial substitute(const Polynomial& p, const std::map<VarId, Polynomial>& substitution);

/// Largest |coefficient| of p - q.
double max_coefficient_difference(const Polynomial& p, const Polynomial& q);

/// Dot product sum_i a_i * b_i.
Polynomial dot(const PolynomialVector& a, const PolynomialVector& b);

} // namespace agcv
