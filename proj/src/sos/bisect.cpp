// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sos/bisect.hpp"

#include <cmath>
#include <stdexcept>

namespace agcv::sos {

int bisection_steps(double lo, double hi, double tol) {
    if (!(tol > 0.0)) {
        throw std::invalid_argument("bisection tolerance must be positive");
    }
    const double width = hi - lo;
    if (width <= tol) {
        return 0;
    }
    return static_cast<int>(std::ceil(std::log2(width / tol)));
}

BisectionResult bisect_scalar(const FeasibilityProbe& probe, Direction direction, double lo, double hi, double tol) {
    if (hi < lo) {
        throw std::invalid_argument("bisection bracket is reversed");
    }
    BisectionResult res;
    const bool minimize = direction == Direction::MinimizeFindSmallestFeasible;
    auto run = [&](double v) {
        ProgramResult r = probe(v);
        res.probes.push_back({v, r.feasible()});
        return r;
    };

    // feasible side endpoint first
    double good = minimize ? hi : lo;
    double bad = minimize ? lo : hi;
    ProgramResult at_good = run(good);
    if (lo == hi) {
        res.outcome = at_good.feasible() ? BisectionOutcome::Found : BisectionOutcome::Infeasible;
        res.value = res.feasible_end = res.infeasible_end = lo;
        res.certificate = std::move(at_good);
        return res;
    }
    ProgramResult at_bad = run(bad);
    if (!at_good.feasible()) {
        res.outcome = at_bad.feasible() ? BisectionOutcome::Inconsistent : BisectionOutcome::Infeasible;
        res.value = res.feasible_end = bad;
        res.infeasible_end = good;
        if (at_bad.feasible()) {
            res.certificate = std::move(at_bad);
        }
        return res;
    }
    if (at_bad.feasible()) {
        res.outcome = BisectionOutcome::Found;
        res.value = res.feasible_end = res.infeasible_end = bad;
        res.certificate = std::move(at_bad);
        return res;
    }
    res.certificate = std::move(at_good);
    const int steps = bisection_steps(lo, hi, tol);
    for (int k = 0; k < steps; ++k) {
        const double mid = 0.5 * (good + bad);
        ProgramResult r = run(mid);
        if (r.feasible()) {
            good = mid;
            res.certificate = std::move(r);
        } else {
            bad = mid;
        }
        ++res.iterations;
    }
    res.outcome = BisectionOutcome::Found;
    res.value = res.feasible_end = good;
    res.infeasible_end = bad;
    return res;
}

BisectionResult bisect_scalar(const std::function<SosProgram(double)>& program_template, Direction direction,
                              double lo, double hi, double tol, const sdp::SolverSettings& solver) {
    return bisect_scalar([&](double v) { return solve(program_template(v), solver); }, direction, lo, hi, tol);
}

} // namespace agcv::sos
