// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sos/program.hpp"

#include <algorithm>
#include <stdexcept>

namespace agcv::sos {

std::size_t GramLayout::num_slots() const { return pairs.empty() ? basis.size() : pairs.size(); }

GramLayout gram_parameterize(const PolynomialVariable& unknown) {
    GramLayout layout;
    if (unknown.kind == Kind::Free) {
        layout.basis = monomial_basis(unknown.variables, unknown.degree);
        return layout;
    }
    if (unknown.degree % 2 != 0) {
        throw std::invalid_argument("SOS unknown '" + unknown.name + "' must have even degree");
    }
    layout.basis = monomial_basis(unknown.variables, unknown.degree / 2);
    for (std::size_t i = 0; i < layout.basis.size(); ++i) {
        for (std::size_t j = i; j < layout.basis.size(); ++j) {
            layout.pairs.emplace_back(i, j);
        }
    }
    return layout;
}

std::vector<Monomial> constraint_basis(std::span<const VarId> vars, int degree) {
    if (degree <= 0) {
        return {Monomial{}};
    }
    return monomial_basis(vars, static_cast<unsigned>((degree + 1) / 2));
}

LinearExpr SosProgram::declare(PolynomialVariable v) {
    GramLayout layout = gram_parameterize(v);
    const auto id = static_cast<std::uint32_t>(unknowns_.size());
    LinearExpr e;
    if (v.kind == Kind::Free) {
        for (std::size_t k = 0; k < layout.basis.size(); ++k) {
            e += LinearExpr::slot({SlotRef::Owner::Unknown, id, static_cast<std::uint32_t>(k)},
                                  Polynomial(layout.basis[k]));
        }
    } else {
        for (std::size_t k = 0; k < layout.pairs.size(); ++k) {
            const auto [i, j] = layout.pairs[k];
            e += LinearExpr::slot({SlotRef::Owner::Unknown, id, static_cast<std::uint32_t>(k)},
                                  Polynomial(layout.basis[i] * layout.basis[j], i == j ? 1.0 : 2.0));
        }
    }
    unknowns_.push_back(std::move(v));
    layouts_.push_back(std::move(layout));
    return e;
}

LinearExpr SosProgram::new_free(std::string name, std::vector<VarId> vars, unsigned degree) {
    return declare({std::move(name), std::move(vars), degree, Kind::Free});
}

LinearExpr SosProgram::new_sos(std::string name, std::vector<VarId> vars, unsigned degree) {
    return declare({std::move(name), std::move(vars), degree, Kind::Sos});
}

LinearExpr SosProgram::new_scalar(std::string name, Sign sign) {
    const auto id = static_cast<std::uint32_t>(scalars_.size());
    scalars_.push_back({std::move(name), sign});
    return LinearExpr::slot({SlotRef::Owner::Scalar, id, 0}, Polynomial(1.0));
}

void SosProgram::add_sos(std::string label, LinearExpr expression, std::vector<VarId> vars) {
    for (const auto& [ref, img] : expression.slots()) {
        const bool ok = ref.owner == SlotRef::Owner::Scalar
                            ? ref.id < scalars_.size() && ref.index == 0
                            : ref.id < unknowns_.size() && ref.index < layouts_[ref.id].num_slots();
        if (!ok) {
            throw std::invalid_argument("constraint '" + label + "' references an undeclared unknown");
        }
    }
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (const VarId v : expression.variables()) {
        if (!std::binary_search(vars.begin(), vars.end(), v)) {
            throw std::invalid_argument("constraint '" + label + "' uses a variable outside its SOS ring");
        }
    }
    constraints_.push_back({std::move(label), std::move(expression), std::move(vars)});
}

void SosProgram::minimize(const LinearExpr& objective) {
    if (objective.known().degree() > 0) {
        throw std::invalid_argument("objective must be linear in scalar unknowns");
    }
    objective_.clear();
    for (const auto& [ref, img] : objective.slots()) {
        if (ref.owner != SlotRef::Owner::Scalar || img.degree() > 0 || ref.id >= scalars_.size()) {
            throw std::invalid_argument("objective must be linear in scalar unknowns");
        }
        objective_[ref.id] = img.constant_term();
    }
}

} // namespace agcv::sos
