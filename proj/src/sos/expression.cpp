// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sos/expression.hpp"

#include <algorithm>

namespace agcv::sos {

LinearExpr LinearExpr::slot(SlotRef ref, Polynomial image) {
    LinearExpr e;
    if (!image.is_zero()) {
        e.slots_.emplace(ref, std::move(image));
    }
    return e;
}

int LinearExpr::degree() const {
    int d = known_.degree();
    for (const auto& [ref, img] : slots_) {
        d = std::max(d, img.degree());
    }
    return d;
}

std::vector<VarId> LinearExpr::variables() const {
    std::vector<VarId> out = known_.variables();
    for (const auto& [ref, img] : slots_) {
        const auto v = img.variables();
        out.insert(out.end(), v.begin(), v.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

LinearExpr& LinearExpr::operator+=(const LinearExpr& o) {
    known_ += o.known_;
    for (const auto& [ref, img] : o.slots_) {
        auto [it, inserted] = slots_.try_emplace(ref, img);
        if (!inserted) {
            it->second += img;
            if (it->second.is_zero()) {
                slots_.erase(it);
            }
        }
    }
    return *this;
}

LinearExpr& LinearExpr::operator-=(const LinearExpr& o) { return *this += -1.0 * o; }

LinearExpr& LinearExpr::operator*=(double s) {
    if (s == 0.0) {
        known_ = Polynomial();
        slots_.clear();
        return *this;
    }
    known_ *= s;
    for (auto& [ref, img] : slots_) {
        img *= s;
    }
    return *this;
}

LinearExpr& LinearExpr::operator*=(const Polynomial& p) {
    known_ = known_ * p;
    for (auto it = slots_.begin(); it != slots_.end();) {
        it->second = it->second * p;
        it = it->second.is_zero() ? slots_.erase(it) : std::next(it);
    }
    return *this;
}

LinearExpr operator*(const LinearExpr& a, const LinearExpr& b) {
    if (!a.is_known() && !b.is_known()) {
        throw BilinearError("product of two expressions that both contain unknowns");
    }
    if (a.is_known()) {
        LinearExpr out = b;
        out *= a.known();
        return out;
    }
    LinearExpr out = a;
    out *= b.known();
    return out;
}

LinearExpr LinearExpr::derivative(VarId var) const {
    LinearExpr out(agcv::derivative(known_, var));
    for (const auto& [ref, img] : slots_) {
        Polynomial d = agcv::derivative(img, var);
        if (!d.is_zero()) {
            out.slots_.emplace(ref, std::move(d));
        }
    }
    return out;
}

Polynomial LinearExpr::value(const std::map<SlotRef, double>& values) const {
    Polynomial out = known_;
    for (const auto& [ref, img] : slots_) {
        const auto it = values.find(ref);
        if (it != values.end() && it->second != 0.0) {
            out += it->second * img;
        }
    }
    return out;
}

LinearExpr gradient_dot(const LinearExpr& e, std::span<const VarId> vars, const PolynomialVector& f) {
    if (vars.size() != f.size()) {
        throw std::invalid_argument("gradient_dot: dimension mismatch");
    }
    LinearExpr out;
    for (std::size_t i = 0; i < vars.size(); ++i) {
        out += e.derivative(vars[i]) * LinearExpr(f[i]);
    }
    return out;
}

} // namespace agcv::sos
