// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"

#include "agcv/app/examples.hpp"
#include "agcv/app/model_file.hpp"
#include "agcv/contracts/compatibility.hpp"
#include "agcv/synthesis/synthesis.hpp"

using namespace agcv;

namespace {

const char* kScalar = R"(
[variables]
names = ["x"]

[subsystem.1]
state = ["x"]
dynamics = ["-x"]
initial_set = ["1 - x^2"]
safe_region = ["4 - x^2"]
)";

const char* kChain = R"(
[variables]
names = ["x1", "x2"]

[subsystem.1]
state = ["x1"]
outputs = ["x1"]
output_map = ["x1"]
dynamics = ["-x1"]
initial_set = ["1 - x1^2"]
safe_region = ["4 - x1^2"]

[subsystem.2]
state = ["x2"]
dynamics = ["-x2 + 0.1*x1"]
initial_set = ["1 - x2^2"]
safe_region = ["4 - x2^2"]
inputs.1 = ["x1"]
bounds.1 = ["4 - x1^2"]

[edges]
1 -> 2
)";

double min_of(const PolynomialVector& g, std::span<const double> pt) {
    double m = INFINITY;
    for (const auto& p : g) {
        m = std::min(m, evaluate(p, pt));
    }
    return m;
}

} // namespace

TEST_CASE("stable scalar system admits a barrier") {
    const auto m = app::parse_model(kScalar);
    const Subsystem& s = m.system.subsystems.at(1);
    SynthesisConfig cfg;
    const LocalResult r = local_feasibility(s, 0.0, 0.0, cfg);
    REQUIRE(r.feasible());
    const Polynomial& h = r.contract->barrier;

    // sampled oracle: h >= 0 on X0, h < 0 outside the safe region, and the
    // barrier condition holds on the safe region
    const Polynomial dh = derivative(h, s.state[0]);
    for (int i = 0; i <= 400; ++i) {
        const double x = -3.0 + 6.0 * i / 400.0;
        const std::vector<double> pt{x};
        if (1 - x * x >= 0) {
            CHECK(evaluate(h, pt) >= -1e-6);
        }
        if (4 - x * x < 0) {
            CHECK(evaluate(h, pt) < 0.0);
        }
        if (4 - x * x >= 0) {
            CHECK(evaluate(dh, pt) * -x + cfg.gain_a * evaluate(h, pt) >= -1e-6);
        }
    }
}

TEST_CASE("empty safe region is infeasible") {
    std::string text = kScalar;
    text.replace(text.find("4 - x^2"), 7, "-1 - x^2");
    const auto m = app::parse_model(text);
    SynthesisConfig cfg;
    const LocalResult r = local_feasibility(m.system.subsystems.at(1), 0.0, 0.0, cfg);
    CHECK_FALSE(r.feasible());
}

TEST_CASE("search brackets") {
    const auto m = app::parse_model(app::platooning_model(3));
    SynthesisConfig cfg;
    // twice the peak of 2.439 - v^2
    CHECK(delta_upper_bound(m.system.subsystems.at(3), cfg) == doctest::Approx(4.878));
    cfg.delta_max = 3.0;
    CHECK(delta_upper_bound(m.system.subsystems.at(3), cfg) == 3.0);

    const auto scalar = app::parse_model(kScalar);
    // sample points 0 and +-1 of X0 give min q = 3
    CHECK(zeta_upper_bound(scalar.system.subsystems.at(1), 0.0, SynthesisConfig{}) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(zeta_upper_bound(scalar.system.subsystems.at(1), 1.0, SynthesisConfig{}) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("safe-region update without children keeps the offset") {
    const auto m = app::parse_model(app::platooning_model(3));
    const ScalarSearch r = update_safe_region(m.system.subsystems.at(3), {}, 0.0, SynthesisConfig{});
    REQUIRE(r.feasible);
    CHECK(r.value == 0.0);
    const ScalarSearch r2 = update_safe_region(m.system.subsystems.at(3), {}, 12.5, SynthesisConfig{});
    REQUIRE(r2.feasible);
    CHECK(r2.value == 12.5);
}

TEST_CASE("safe-region update meets a child's assumption") {
    const auto m = app::parse_model(kChain);
    const Subsystem& parent = m.system.subsystems.at(1);
    const Subsystem& child = m.system.subsystems.at(2);
    SynthesisConfig cfg;
    const ChildAssumption a{2, child.inputs.front().bounds, 3.0};
    const ScalarSearch r = update_safe_region(parent, {a}, 0.0, cfg);
    REQUIRE(r.feasible);
    // {4 - x1^2 >= z} inside {4 - x1^2 >= 3} needs z >= 3
    CHECK(r.value == doctest::Approx(3.0).epsilon(2 * cfg.bisection_tol));
    CHECK(r.value >= 3.0 - 1e-6);

    // a requirement beyond the peak of q empties the region
    const ChildAssumption tight{2, child.inputs.front().bounds, 4.5};
    CHECK_FALSE(update_safe_region(parent, {tight}, 0.0, cfg).feasible);
}

TEST_CASE("local feasibility is monotone in delta") {
    const auto m = app::parse_model(app::platooning_model(3));
    const Subsystem& s = m.system.subsystems.at(3);
    SynthesisConfig cfg;
    cfg.gain_a = 1.4;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1.0, 2.4);
    for (int i = 0; i < 6; ++i) {
        double d1 = u(rng);
        double d2 = u(rng);
        if (d1 > d2) {
            std::swap(d1, d2);
        }
        const bool f1 = local_feasibility(s, d1, 0.0, cfg).feasible();
        const bool f2 = local_feasibility(s, d2, 0.0, cfg).feasible();
        CAPTURE(d1);
        CAPTURE(d2);
        CHECK((!f1 || f2));
    }
}

TEST_CASE("bisection results bracket the threshold") {
    const auto m = app::parse_model(app::platooning_model(3));
    const Subsystem& s = m.system.subsystems.at(3);
    SynthesisConfig cfg;
    cfg.gain_a = 1.4;
    // same multiplier scope in the scalar and the fixed-point programs
    cfg.sigma_input_scope = InputScope::Inputs;
    const ScalarSearch d = maximal_internal_input_set(s, 0.0, cfg);
    REQUIRE(d.feasible);
    CHECK(d.value > d.lo);
    CHECK(d.value <= d.hi);
    CHECK(local_feasibility(s, d.value, 0.0, cfg).feasible());
    CHECK_FALSE(local_feasibility(s, d.value - 2 * cfg.bisection_tol, 0.0, cfg).feasible());

    const ScalarSearch z = minimal_safe_region(s, d.value, cfg);
    REQUIRE(z.feasible);
    CHECK(z.value >= 0.0);
    CHECK(local_feasibility(s, d.value, z.value, cfg).feasible());
    // z* grows with delta
    const ScalarSearch z2 = minimal_safe_region(s, d.value + 0.5, cfg);
    REQUIRE(z2.feasible);
    CHECK(z2.value >= z.value - 2 * cfg.bisection_tol);
}

TEST_CASE("compatibility is established only when implied") {
    const auto m = app::parse_model(kChain);
    const Subsystem& parent = m.system.subsystems.at(1);
    const Subsystem& child = m.system.subsystems.at(2);
    SynthesisConfig cfg;
    const LocalResult pr = local_feasibility(parent, 0.0, 0.0, cfg);
    REQUIRE(pr.feasible());
    const Contract& pc = *pr.contract;

    const CompatibilityResult ok = check_compatibility(parent, pc, child, 0.0);
    REQUIRE(ok.established);
    REQUIRE(ok.evidence.has_value());

    // sampled oracle over the parent's guarantee {h >= 0}
    const PolynomialVector assumption = project_assumption(child, 1, 0.0);
    std::vector<double> pt(m.system.variables.size(), 0.0);
    for (int i = 0; i <= 600; ++i) {
        pt[parent.state[0]] = -3.0 + 6.0 * i / 600.0;
        if (evaluate(pc.barrier, pt) >= 0.0) {
            CHECK(min_of(assumption, pt) >= -1e-9);
        }
    }

    // X0 lies inside {h >= 0}, so |x1| <= 0.3 cannot follow
    const CompatibilityResult no = check_compatibility(parent, pc, child, 3.9);
    CHECK_FALSE(no.established);
    CHECK_FALSE(no.failure.empty());
}

TEST_CASE("config validation rejects bad values") {
    SynthesisConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.epsilon = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SynthesisConfig{};
    cfg.bisection_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SynthesisConfig{};
    cfg.sigma_degree = 3;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(input_scope_from_string(to_string(InputScope::Joint)) == InputScope::Joint);
}
