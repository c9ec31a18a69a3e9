// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>

#include "doctest.h"

#include "agcv/poly/parse.hpp"
#include "agcv/poly/polynomial.hpp"

using namespace agcv;

namespace {

Polynomial random_poly(std::mt19937_64& rng, std::span<const VarId> vars, unsigned max_degree, int terms) {
    std::uniform_int_distribution<int> coef(-5, 5);
    std::uniform_int_distribution<std::size_t> pick(0, 0);
    const auto basis = monomial_basis(vars, max_degree);
    std::uniform_int_distribution<std::size_t> which(0, basis.size() - 1);
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        p.add_term(basis[which(rng)], coef(rng));
    }
    return p;
}

} // namespace

TEST_CASE("monomial basis order and counts") {
    VariableTable t;
    const VarId x = t.intern("x");
    const VarId y = t.intern("y");
    const std::vector<VarId> xs{x};
    const auto b1 = monomial_basis(xs, 2);
    REQUIRE(b1.size() == 3);
    CHECK(b1[0] == Monomial{});
    CHECK(b1[1] == Monomial::variable(x));
    CHECK(b1[2] == Monomial::variable(x, 2));

    const std::vector<VarId> xy{x, y};
    const auto b2 = monomial_basis(xy, 1);
    REQUIRE(b2.size() == 3);
    CHECK(b2[1] == Monomial::variable(x));
    CHECK(b2[2] == Monomial::variable(y));

    const auto b3 = monomial_basis(xy, 2);
    REQUIRE(b3.size() == 6);
    CHECK(b3[3] == Monomial::variable(x, 2));
    CHECK(b3[4] == Monomial({{x, 1}, {y, 1}}));
    CHECK(b3[5] == Monomial::variable(y, 2));

    // C(n + d, d)
    VariableTable t2;
    std::vector<VarId> vs;
    for (int i = 0; i < 4; ++i) {
        vs.push_back(t2.intern("v" + std::to_string(i)));
    }
    CHECK(monomial_basis(vs, 3).size() == 35);
    CHECK(monomial_basis(vs, 0).size() == 1);
}

TEST_CASE("add, mul and cancellation") {
    VariableTable t;
    const Polynomial x = parse_polynomial("x", t);
    const Polynomial y = parse_polynomial("y", t);
    CHECK(parse_polynomial("x^2 + 1", t) + parse_polynomial("2*x^2", t) == parse_polynomial("3*x^2 + 1", t));
    CHECK((parse_polynomial("x^2*y - y", t) + parse_polynomial("y - x^2*y", t)).is_zero());
    CHECK((x + y) * (x - y) == x * x - y * y);
    CHECK(pow(x + 1.0, 2) == x * x + 2.0 * x + 1.0);
    CHECK((x * y).degree() == 2);
    CHECK(Polynomial().degree() == -1);
}

TEST_CASE("evaluate") {
    VariableTable t;
    const Polynomial p = parse_polynomial("x^2 + y", t);
    const std::unordered_map<VarId, double> pt{{t.at("x"), 2.0}, {t.at("y"), 1.0}};
    CHECK(evaluate(p, pt) == doctest::Approx(5.0));
    const Polynomial motzkin = parse_polynomial("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", t);
    const std::unordered_map<VarId, double> ones{{t.at("x"), 1.0}, {t.at("y"), 1.0}};
    CHECK(std::abs(evaluate(motzkin, ones)) < 1e-15);
    const std::unordered_map<VarId, double> zeros{{t.at("x"), 0.0}, {t.at("y"), 0.0}};
    CHECK(evaluate(motzkin, zeros) == 1.0);
    const std::unordered_map<VarId, double> partial{{t.at("x"), 0.0}};
    CHECK_THROWS_AS(evaluate(p, partial), std::out_of_range);
}

TEST_CASE("gradient matches power rule and central differences") {
    VariableTable t;
    const Polynomial p = parse_polynomial("x^2 + 3*x*y", t);
    const std::vector<VarId> xy{t.at("x"), t.at("y")};
    const auto g = gradient(p, xy);
    CHECK(g[0] == parse_polynomial("2*x + 3*y", t));
    CHECK(g[1] == parse_polynomial("3*x", t));
    const auto gc = gradient(Polynomial(4.0), xy);
    CHECK(gc[0].is_zero());
    CHECK(gc[1].is_zero());

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    const Polynomial q = random_poly(rng, xy, 4, 12);
    const auto gq = gradient(q, xy);
    const double eps = 1e-5;
    for (int k = 0; k < 100; ++k) {
        std::vector<double> pt{u(rng), u(rng)};
        for (std::size_t i = 0; i < 2; ++i) {
            auto hi = pt;
            auto lo = pt;
            hi[i] += eps;
            lo[i] -= eps;
            const double fd = (evaluate(q, hi) - evaluate(q, lo)) / (2 * eps);
            CHECK(std::abs(fd - evaluate(gq[i], pt)) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST_CASE("compose and substitute") {
    VariableTable t;
    const Polynomial p = parse_polynomial("y^2", t);
    const VarId x = t.intern("x");
    const VarId y = t.at("y");
    CHECK(compose(p, {{y, Polynomial::variable(x) + 1.0}}) == parse_polynomial("x^2 + 2*x + 1", t));
    CHECK(compose(p, {{y, Polynomial::variable(y)}}) == p);
    CHECK_THROWS_AS(compose(parse_polynomial("x*y", t), {{y, Polynomial(1.0)}}), std::out_of_range);
    CHECK(substitute(parse_polynomial("x*y", t), {{y, Polynomial(2.0)}}) == 2.0 * Polynomial::variable(x));

    const Polynomial d = parse_polynomial("2.439 - v^2", t);
    const VarId v = t.at("v");
    CHECK(compose(d, {{v, Polynomial::variable(v)}}) == d);
}

TEST_CASE("ring axioms on random polynomials") {
    VariableTable t;
    const std::vector<VarId> vs{t.intern("a"), t.intern("b"), t.intern("c")};
    std::mt19937_64 rng(11);
    for (int k = 0; k < 25; ++k) {
        const Polynomial p = random_poly(rng, vs, 3, 6);
        const Polynomial q = random_poly(rng, vs, 3, 6);
        const Polynomial r = random_poly(rng, vs, 2, 5);
        CHECK(p + q == q + p);
        CHECK(p * q == q * p);
        CHECK((p + q) + r == p + (q + r));
        CHECK((p * q) * r == p * (q * r));
        CHECK(p * (q + r) == p * q + p * r);
        CHECK(p + Polynomial() == p);
        CHECK(p * Polynomial(1.0) == p);
    }
}

TEST_CASE("evaluation is multiplicative") {
    VariableTable t;
    const std::vector<VarId> vs{t.intern("a"), t.intern("b")};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::uniform_real_distribution<double> cu(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        Polynomial p;
        Polynomial q;
        for (const auto& m : monomial_basis(vs, 3)) {
            p.add_term(m, cu(rng));
            q.add_term(m, cu(rng));
        }
        const std::vector<double> pt{u(rng), u(rng)};
        const double lhs = evaluate(p * q, pt);
        const double rhs = evaluate(p, pt) * evaluate(q, pt);
        CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("chain rule for compose") {
    VariableTable t;
    const std::vector<VarId> ys{t.intern("y1"), t.intern("y2")};
    const std::vector<VarId> xs{t.intern("x1"), t.intern("x2"), t.intern("x3")};
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
        const Polynomial p = random_poly(rng, ys, 3, 5);
        std::map<VarId, Polynomial> sub;
        for (VarId y : ys) {
            sub[y] = random_poly(rng, xs, 2, 4);
        }
        const Polynomial composed = compose(p, sub);
        const auto lhs = gradient(composed, xs);
        const auto dp = gradient(p, ys);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            Polynomial rhs;
            for (std::size_t j = 0; j < ys.size(); ++j) {
                rhs += compose(dp[j], sub) * derivative(sub[ys[j]], xs[i]);
            }
            CHECK(max_coefficient_difference(lhs[i], rhs) <= 1e-9 * std::max(1.0, rhs.max_abs_coefficient()));
        }
    }
}

TEST_CASE("parser accepts polynomial syntax and rejects the rest") {
    VariableTable t;
    const Polynomial p = parse_polynomial("3.5*x1^2*v2 - 0.8", t);
    CHECK(p.degree() == 3);
    CHECK(p.constant_term() == doctest::Approx(-0.8));
    CHECK(parse_polynomial(" ( x + 1 ) ^ 2 ", t) == parse_polynomial("x^2+2*x+1", t));
    CHECK(parse_polynomial("x/2", t) == 0.5 * Polynomial::variable(t.at("x")));
    CHECK(parse_polynomial("-x^2", t) == -1.0 * pow(Polynomial::variable(t.at("x")), 2));
    CHECK(parse_polynomial("1e-3*x", t).coefficient(Monomial::variable(t.at("x"))) == doctest::Approx(1e-3));
    CHECK_THROWS_AS(parse_polynomial("1/x", t), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x^0.5", t), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x^-1", t), ParseError);
    CHECK_THROWS_AS(parse_polynomial("sin(x)", t), ParseError);
    CHECK_THROWS_AS(parse_polynomial("x + ", t), ParseError);
    CHECK_THROWS_AS(parse_polynomial("", t), ParseError);
    try {
        parse_polynomial("x + $", t);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.column() == 5);
    }
    const VariableTable& frozen = t;
    CHECK_THROWS_AS(parse_polynomial("zz", frozen), ParseError);
}

TEST_CASE("serialization round-trips byte-identically") {
    VariableTable t;
    const std::vector<VarId> vs{t.intern("x"), t.intern("y"), t.intern("z")};
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> cu(-10.0, 10.0);
    for (int k = 0; k < 20; ++k) {
        Polynomial p;
        for (const auto& m : monomial_basis(vs, 3)) {
            if (cu(rng) > 0) {
                p.add_term(m, cu(rng) / 3.0);
            }
        }
        const std::string text = to_string(p, t);
        const Polynomial back = parse_polynomial(text, t);
        CHECK(back == p);
        CHECK(to_string(back, t) == text);
    }
    CHECK(to_string(parse_polynomial("1 - x^2 + 3*x*y", t), t) == "-x^2 + 3*x*y + 1");
    CHECK(to_string(Polynomial(), t) == "0");
}
