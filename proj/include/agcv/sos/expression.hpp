// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>

#include "agcv/poly/polynomial.hpp"

namespace agcv::sos {

/// One scalar degree of freedom of a program: a coefficient of a free
/// polynomial, an upper-triangle Gram entry of an SOS polynomial, or a named
/// scalar.
struct SlotRef {
    enum class Owner : std::uint8_t { Unknown, Scalar };
    Owner owner = Owner::Unknown;
    std::uint32_t id = 0;
    std::uint32_t index = 0;

    friend auto operator<=>(const SlotRef&, const SlotRef&) = default;
};

/// Thrown when an expression would become bilinear in the unknowns.
class BilinearError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Polynomial expression affine in the program's slots:
///   known + sum_s value(s) * image(s).
class LinearExpr {
  public:
    using SlotMap = std::map<SlotRef, Polynomial>;

    LinearExpr() = default;
    LinearExpr(Polynomial known) : known_(std::move(known)) {} // NOLINT(google-explicit-constructor)
    LinearExpr(double c) : known_(c) {}                        // NOLINT(google-explicit-constructor)

    static LinearExpr slot(SlotRef ref, Polynomial image);

    [[nodiscard]] const Polynomial& known() const { return known_; }
    [[nodiscard]] const SlotMap& slots() const { return slots_; }
    [[nodiscard]] bool is_known() const { return slots_.empty(); }
    [[nodiscard]] int degree() const;
    /// Every variable appearing in the known part or any slot image.
    [[nodiscard]] std::vector<VarId> variables() const;

    LinearExpr& operator+=(const LinearExpr& o);
    LinearExpr& operator-=(const LinearExpr& o);
    LinearExpr& operator*=(double s);
    LinearExpr& operator*=(const Polynomial& p);

    friend LinearExpr operator+(LinearExpr a, const LinearExpr& b) { return a += b; }
    friend LinearExpr operator-(LinearExpr a, const LinearExpr& b) { return a -= b; }
    friend LinearExpr operator-(LinearExpr a) { return a *= -1.0; }
    friend LinearExpr operator*(LinearExpr a, double s) { return a *= s; }
    friend LinearExpr operator*(double s, LinearExpr a) { return a *= s; }
    /// Throws BilinearError when both factors carry unknown slots.
    friend LinearExpr operator*(const LinearExpr& a, const LinearExpr& b);

    [[nodiscard]] LinearExpr derivative(VarId var) const;

    /// Substitutes slot values; missing slots count as zero.
    [[nodiscard]] Polynomial value(const std::map<SlotRef, double>& values) const;

  private:
    Polynomial known_;
    SlotMap slots_;
};

/// sum_i grad(e)_i * f_i over the listed variables.
LinearExpr gradient_dot(const LinearExpr& e, std::span<const VarId> vars, const PolynomialVector& f);

} // namespace agcv::sos
