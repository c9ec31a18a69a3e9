// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"

#include "agcv/poly/parse.hpp"
#include "agcv/sdp/sdpa.hpp"
#include "agcv/sos/bisect.hpp"
#include "agcv/sos/compile.hpp"

using namespace agcv;
using namespace agcv::sos;

TEST_CASE("gram parameterization sizes") {
    VariableTable t;
    const VarId x = t.intern("x");
    const VarId y = t.intern("y");
    const auto a = gram_parameterize({"s", {x}, 2, Kind::Sos});
    CHECK(a.basis.size() == 2);
    CHECK(a.num_slots() == 3);
    const auto b = gram_parameterize({"p", {x, y}, 1, Kind::Free});
    CHECK(b.num_slots() == 3);
    const auto c = gram_parameterize({"s", {x, y}, 4, Kind::Sos});
    CHECK(c.basis.size() == 6);
    CHECK(c.num_slots() == 21);
    CHECK_THROWS_AS(gram_parameterize({"s", {x}, 3, Kind::Sos}), std::invalid_argument);
}

TEST_CASE("completing the square") {
    VariableTable t;
    const Polynomial x = parse_polynomial("x", t);
    const std::vector<VarId> xs{t.at("x")};
    {
        SosProgram p;
        const LinearExpr c = p.new_scalar("c");
        p.add_sos("square", LinearExpr(x * x) + c, xs);
        p.minimize(c);
        const auto r = solve(p);
        REQUIRE(r.feasible());
        CHECK(std::abs(r.extraction.scalars.at("c")) <= 1e-4);
        CHECK(r.extraction.max_residual <= 1e-6);
    }
    {
        SosProgram p;
        const LinearExpr c = p.new_scalar("c");
        p.add_sos("square", LinearExpr(x * x - 2.0 * x) + c, xs);
        p.minimize(c);
        const auto r = solve(p);
        REQUIRE(r.feasible());
        CHECK(std::abs(r.extraction.scalars.at("c") - 1.0) <= 1e-4);
    }
}

TEST_CASE("Motzkin polynomial is not a sum of squares") {
    VariableTable t;
    const Polynomial m = parse_polynomial("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", t);
    SosProgram p;
    p.add_sos("motzkin", LinearExpr(m), {t.at("x"), t.at("y")});
    const Compiled c = compile(p);
    CHECK(c.map.constraints[0].basis.size() == 10);
    const auto sol = sdp::solve(c.problem);
    CHECK(sol.status == sdp::Status::Infeasible);
    // the exported problem reads back to an equivalent SDP
    const auto back = sdp::from_sdpa(sdp::to_sdpa(c.problem));
    CHECK(sdp::solve(back).status == sdp::Status::Infeasible);

    // adding (x^2 + y^2 + 1) as a multiplier makes it SOS
    SosProgram q;
    q.add_sos("motzkin_times", LinearExpr(m * parse_polynomial("x^2 + y^2 + 1", t)), {t.at("x"), t.at("y")});
    CHECK(solve(q).feasible());
}

TEST_CASE("rank-one gram expansion") {
    VariableTable t;
    const VarId x = t.intern("x");
    Eigen::MatrixXd g(2, 2);
    g << 1, -1, -1, 1;
    const std::vector<Monomial> basis{Monomial{}, Monomial::variable(x)};
    CHECK(expand_gram(basis, g) == parse_polynomial("1 - 2*x + x^2", t));
}

TEST_CASE("bilinear products are rejected") {
    VariableTable t;
    const std::vector<VarId> xs{t.intern("x")};
    SosProgram p;
    const LinearExpr h = p.new_free("h", xs, 2);
    const LinearExpr s = p.new_sos("s", xs, 2);
    CHECK_THROWS_AS(h * s, BilinearError);
    CHECK_NOTHROW(h * LinearExpr(parse_polynomial("x + 1", t)));
}

TEST_CASE("extraction round-trip and soundness on random SOS programs") {
    VariableTable t;
    const std::vector<VarId> vs{t.intern("x"), t.intern("y")};
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> pt(-10.0, 10.0);
    for (int trial = 0; trial < 5; ++trial) {
        Polynomial target;
        for (int k = 0; k < 3; ++k) {
            Polynomial q;
            for (const auto& m : monomial_basis(vs, 2)) {
                q.add_term(m, u(rng));
            }
            target += q * q;
        }
        SosProgram p;
        const LinearExpr s = p.new_sos("s", vs, 2);
        const LinearExpr h = p.new_free("h", vs, 2);
        // target - s*(1) - h  with h free: force h = target - s - gram
        p.add_sos("a", LinearExpr(target) - s * LinearExpr(Polynomial(1.0)) - h, vs);
        p.add_sos("b", h, vs);
        const auto r = solve(p);
        REQUIRE(r.feasible());
        CHECK(r.extraction.max_residual <= 1e-6);
        for (const auto& ev : r.extraction.constraints) {
            const Polynomial g = expand_gram(ev.basis, ev.gram);
            for (int k = 0; k < 1000; ++k) {
                const std::vector<double> point{pt(rng), pt(rng)};
                CHECK(evaluate(g, point) >= -1e-6);
            }
        }
    }
}

TEST_CASE("bisection finds the feasibility boundary") {
    VariableTable t;
    const Polynomial x = parse_polynomial("x", t);
    const std::vector<VarId> xs{t.at("x")};
    auto tmpl = [&](double delta) {
        SosProgram p;
        p.add_sos("shifted", LinearExpr(x * x + 1.0 - delta), xs);
        return p;
    };
    const double tol = 1e-3;
    const auto r = bisect_scalar(tmpl, Direction::MaximizeFindLargestFeasible, 0.0, 2.0, tol);
    REQUIRE(r.outcome == BisectionOutcome::Found);
    CHECK(std::abs(r.value - 1.0) <= tol);
    CHECK(r.value <= 1.0 + 1e-6);
    CHECK(r.iterations == bisection_steps(0.0, 2.0, tol));
    CHECK(r.iterations == 11);
    // every probe respects monotone feasibility
    for (const auto& pr : r.probes) {
        CHECK(pr.feasible == (pr.value <= 1.0 + 1e-6));
    }

    const auto flat = bisect_scalar(tmpl, Direction::MaximizeFindLargestFeasible, 0.5, 0.5, tol);
    CHECK(flat.outcome == BisectionOutcome::Found);
    CHECK(flat.value == 0.5);

    const auto none = bisect_scalar(tmpl, Direction::MaximizeFindLargestFeasible, 1.5, 2.0, tol);
    CHECK(none.outcome == BisectionOutcome::Infeasible);

    // feasibility reversed relative to the declared direction
    const auto wrong = bisect_scalar(tmpl, Direction::MinimizeFindSmallestFeasible, 0.0, 2.0, tol);
    CHECK(wrong.outcome == BisectionOutcome::Inconsistent);
}
