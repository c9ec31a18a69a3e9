// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/poly/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agcv {

Polynomial::Polynomial(double constant) {
    if (constant != 0.0) {
        terms_.emplace(Monomial{}, constant);
    }
}

Polynomial::Polynomial(const Monomial& m, double coefficient) {
    if (coefficient != 0.0) {
        terms_.emplace(m, coefficient);
    }
}

int Polynomial::degree() const {
    if (terms_.empty()) {
        return -1;
    }
    // highest-degree monomial is last in graded order
    return static_cast<int>(terms_.rbegin()->first.degree());
}

double Polynomial::coefficient(const Monomial& m) const {
    const auto it = terms_.find(m);
    return it == terms_.end() ? 0.0 : it->second;
}

std::vector<VarId> Polynomial::variables() const {
    std::vector<VarId> out;
    for (const auto& [m, c] : terms_) {
        for (const auto& [v, e] : m.powers()) {
            out.push_back(v);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double Polynomial::max_abs_coefficient() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

void Polynomial::add_term(const Monomial& m, double c) {
    if (c == 0.0) {
        return;
    }
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) {
            terms_.erase(it);
        }
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
    for (const auto& [m, c] : other.terms_) {
        add_term(m, c);
    }
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
    for (const auto& [m, c] : other.terms_) {
        add_term(m, -c);
    }
    return *this;
}

Polynomial& Polynomial::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [m, c] : terms_) {
        c *= s;
    }
    return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    for (const auto& [ma, ca] : a.terms_) {
        for (const auto& [mb, cb] : b.terms_) {
            out.add_term(ma * mb, ca * cb);
        }
    }
    return out;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }
Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial pow(const Polynomial& p, unsigned exponent) {
    Polynomial result(1.0);
    Polynomial base = p;
    while (exponent > 0) {
        if (exponent & 1U) {
            result = result * base;
        }
        exponent >>= 1U;
        if (exponent > 0) {
            base = base * base;
        }
    }
    return result;
}

namespace {

double ipow(double x, unsigned e) {
    double r = 1.0;
    while (e > 0) {
        if (e & 1U) {
            r *= x;
        }
        x *= x;
        e >>= 1U;
    }
    return r;
}

} // namespace

double evaluate(const Polynomial& p, std::span<const double> point) {
    double sum = 0.0;
    for (const auto& [m, c] : p.terms()) {
        double term = c;
        for (const auto& [v, e] : m.powers()) {
            if (v >= point.size()) {
                throw std::out_of_range("evaluation point does not assign variable " + std::to_string(v));
            }
            term *= ipow(point[v], e);
        }
        sum += term;
    }
    return sum;
}

double evaluate(const Polynomial& p, const std::unordered_map<VarId, double>& point) {
    double sum = 0.0;
    for (const auto& [m, c] : p.terms()) {
        double term = c;
        for (const auto& [v, e] : m.powers()) {
            const auto it = point.find(v);
            if (it == point.end()) {
                throw std::out_of_range("evaluation point does not assign variable " + std::to_string(v));
            }
            term *= ipow(it->second, e);
        }
        sum += term;
    }
    return sum;
}

Polynomial derivative(const Polynomial& p, VarId var) {
    Polynomial out;
    for (const auto& [m, c] : p.terms()) {
        auto [e, reduced] = m.differentiate(var);
        if (e != 0) {
            out.add_term(reduced, c * e);
        }
    }
    return out;
}

PolynomialVector gradient(const Polynomial& p, std::span<const VarId> vars) {
    PolynomialVector out;
    out.reserve(vars.size());
    for (const VarId v : vars) {
        out.push_back(derivative(p, v));
    }
    return out;
}

namespace {

Polynomial substitute_impl(const Polynomial& p, const std::map<VarId, Polynomial>& substitution, bool total) {
    // cache powers of each image so repeated exponents are expanded once
    std::map<std::pair<VarId, unsigned>, Polynomial> powers;
    auto power_of = [&](VarId v, unsigned e) -> const Polynomial& {
        auto key = std::make_pair(v, e);
        if (auto it = powers.find(key); it != powers.end()) {
            return it->second;
        }
        const auto sub = substitution.find(v);
        Polynomial value = sub == substitution.end() ? Polynomial(Monomial::variable(v, e)) : pow(sub->second, e);
        return powers.emplace(key, std::move(value)).first->second;
    };
    Polynomial out;
    for (const auto& [m, c] : p.terms()) {
        Polynomial term(c);
        for (const auto& [v, e] : m.powers()) {
            if (total && !substitution.contains(v)) {
                throw std::out_of_range("substitution does not assign variable " + std::to_string(v));
            }
            term = term * power_of(v, e);
        }
        out += term;
    }
    return out;
}

} // namespace

Polynomial compose(const Polynomial& p, const std::map<VarId, Polynomial>& substitution) {
    return substitute_impl(p, substitution, true);
}

Polynomial substitute(const Polynomial& p, const std::map<VarId, Polynomial>& substitution) {
    return substitute_impl(p, substitution, false);
}

double max_coefficient_difference(const Polynomial& p, const Polynomial& q) {
    return (p - q).max_abs_coefficient();
}

Polynomial dot(const PolynomialVector& a, const PolynomialVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: size mismatch");
    }
    Polynomial out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        out += a[i] * b[i];
    }
    return out;
}

} // namespace agcv
