// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "agcv/poly/variables.hpp"
#include "agcv/sos/expression.hpp"

namespace agcv::sos {

enum class Kind { Free, Sos };

struct PolynomialVariable {
    std::string name;
    std::vector<VarId> variables;
    unsigned degree = 0;
    Kind kind = Kind::Free;
};

/// Basis and scalar layout of one unknown. Free unknowns own one slot per basis
/// monomial; Sos unknowns own one slot per upper-triangle Gram entry, listed
/// row-major in `pairs`.
struct GramLayout {
    std::vector<Monomial> basis;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    [[nodiscard]] std::size_t num_slots() const;
};

/// Throws std::invalid_argument for an Sos unknown of odd degree.
GramLayout gram_parameterize(const PolynomialVariable& unknown);

enum class Sign { Free, Nonnegative };

struct ScalarVariable {
    std::string name;
    Sign sign = Sign::Free;
};

/// expression ∈ Σ[variables]
struct SosConstraint {
    std::string label;
    LinearExpr expression;
    std::vector<VarId> variables;
};

class SosProgram {
  public:
    /// Declares an unknown and returns it as an expression over its slots.
    LinearExpr new_free(std::string name, std::vector<VarId> vars, unsigned degree);
    LinearExpr new_sos(std::string name, std::vector<VarId> vars, unsigned degree);
    LinearExpr new_scalar(std::string name, Sign sign = Sign::Free);

    /// Requires `expression` ∈ Σ[vars]. Throws std::invalid_argument when the
    /// expression references undeclared slots or variables outside `vars`.
    void add_sos(std::string label, LinearExpr expression, std::vector<VarId> vars);

    /// Minimizes a linear functional of scalar unknowns (constant images only).
    void minimize(const LinearExpr& objective);

    [[nodiscard]] const std::vector<PolynomialVariable>& unknowns() const { return unknowns_; }
    [[nodiscard]] const std::vector<GramLayout>& layouts() const { return layouts_; }
    [[nodiscard]] const std::vector<ScalarVariable>& scalars() const { return scalars_; }
    [[nodiscard]] const std::vector<SosConstraint>& constraints() const { return constraints_; }
    [[nodiscard]] const std::map<std::uint32_t, double>& objective() const { return objective_; }

  private:
    LinearExpr declare(PolynomialVariable v);

    std::vector<PolynomialVariable> unknowns_;
    std::vector<GramLayout> layouts_;
    std::vector<ScalarVariable> scalars_;
    std::vector<SosConstraint> constraints_;
    std::map<std::uint32_t, double> objective_;
};

/// Gram basis for a constraint of the given degree: all monomials in `vars`
/// of degree <= ceil(degree / 2).
std::vector<Monomial> constraint_basis(std::span<const VarId> vars, int degree);

} // namespace agcv::sos
