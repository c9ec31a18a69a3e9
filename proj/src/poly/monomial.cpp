// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/poly/monomial.hpp"

#include <algorithm>

namespace agcv {

Monomial::Monomial(std::vector<Power> powers) {
    std::sort(powers.begin(), powers.end());
    for (const auto& [var, exp] : powers) {
        if (exp == 0) {
            continue;
        }
        if (!powers_.empty() && powers_.back().first == var) {
            powers_.back().second += exp;
        } else {
            powers_.emplace_back(var, exp);
        }
        degree_ += exp;
    }
}

Monomial Monomial::variable(VarId var, unsigned exponent) { return Monomial({{var, exponent}}); }

unsigned Monomial::exponent(VarId var) const {
    const auto it = std::lower_bound(powers_.begin(), powers_.end(), Power{var, 0});
    return (it != powers_.end() && it->first == var) ? it->second : 0;
}

std::pair<unsigned, Monomial> Monomial::differentiate(VarId var) const {
    const unsigned e = exponent(var);
    if (e == 0) {
        return {0, Monomial{}};
    }
    Monomial out = *this;
    for (auto it = out.powers_.begin(); it != out.powers_.end(); ++it) {
        if (it->first == var) {
            if (--it->second == 0) {
                out.powers_.erase(it);
            }
            break;
        }
    }
    --out.degree_;
    return {e, std::move(out)};
}

bool Monomial::only_uses(std::span<const VarId> vars) const {
    return std::all_of(powers_.begin(), powers_.end(), [&](const Power& p) {
        return std::find(vars.begin(), vars.end(), p.first) != vars.end();
    });
}

Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial out;
    out.powers_.reserve(a.powers_.size() + b.powers_.size());
    auto i = a.powers_.begin();
    auto j = b.powers_.begin();
    while (i != a.powers_.end() || j != b.powers_.end()) {
        if (j == b.powers_.end() || (i != a.powers_.end() && i->first < j->first)) {
            out.powers_.push_back(*i++);
        } else if (i == a.powers_.end() || j->first < i->first) {
            out.powers_.push_back(*j++);
        } else {
            out.powers_.emplace_back(i->first, i->second + j->second);
            ++i;
            ++j;
        }
    }
    out.degree_ = a.degree_ + b.degree_;
    return out;
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (a.degree_ != b.degree_) {
        return a.degree_ <=> b.degree_;
    }
    // Same degree: walk variables in id order; a larger exponent on the first
    // differing variable sorts earlier.
    auto i = a.powers_.begin();
    auto j = b.powers_.begin();
    while (i != a.powers_.end() && j != b.powers_.end()) {
        if (i->first != j->first) {
            return i->first < j->first ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        if (i->second != j->second) {
            return i->second > j->second ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        ++i;
        ++j;
    }
    if (i == a.powers_.end() && j == b.powers_.end()) {
        return std::strong_ordering::equal;
    }
    // Equal degree and equal prefix cannot leave only one side exhausted.
    return i == a.powers_.end() ? std::strong_ordering::greater : std::strong_ordering::less;
}

namespace {

void enumerate(std::span<const VarId> vars, std::size_t index, unsigned remaining,
               std::vector<Monomial::Power>& current, std::vector<Monomial>& out) {
    if (index == vars.size()) {
        out.emplace_back(current);
        return;
    }
    for (unsigned e = remaining + 1; e-- > 0;) {
        current.emplace_back(vars[index], e);
        enumerate(vars, index + 1, remaining - e, current, out);
        current.pop_back();
    }
}

} // namespace

std::vector<Monomial> monomial_basis(std::span<const VarId> vars, unsigned max_degree) {
    std::vector<Monomial> out;
    std::vector<Monomial::Power> current;
    for (unsigned d = 0; d <= max_degree; ++d) {
        std::vector<Monomial> layer;
        // exact degree d: enumerate with the last variable absorbing the rest
        std::vector<VarId> sorted(vars.begin(), vars.end());
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        enumerate(sorted, 0, d, current, layer);
        std::erase_if(layer, [d](const Monomial& m) { return m.degree() != d; });
        std::sort(layer.begin(), layer.end());
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

} // namespace agcv
