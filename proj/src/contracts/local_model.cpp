// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/local_model.hpp"

#include <algorithm>

namespace agcv {

Normalization subsystem_normalization(const Subsystem& s, bool enabled) {
    Normalization n;
    if (!enabled) {
        return n;
    }
    n.merge(normalization_for(s.safe_region, s.state));
    for (const auto& g : s.inputs) {
        n.merge(normalization_for(g.bounds, g.vars));
    }
    return n;
}

LocalModel local_model(const Subsystem& s, const Normalization& n) {
    LocalModel m;
    m.state = s.state;
    m.inputs = s.input_vars();
    m.dynamics = n.dynamics(s.dynamics, s.state);
    m.initial_set = n.to_normalized(s.initial_set);
    m.safe_region = n.to_normalized(s.safe_region);
    for (const auto& g : s.inputs) {
        m.groups.push_back({g.parent, g.vars, n.to_normalized(g.bounds)});
    }
    return m;
}

unsigned even_degree(int d) {
    if (d <= 0) {
        return 0;
    }
    return static_cast<unsigned>(d % 2 == 0 ? d : d + 1);
}

unsigned multiplier_degree(int constraint_degree, int multiplicand_degree) {
    return even_degree(std::max(0, constraint_degree - multiplicand_degree));
}

int max_degree(const PolynomialVector& p) {
    int d = 0;
    for (const auto& q : p) {
        d = std::max(d, q.degree());
    }
    return d;
}

} // namespace agcv
