// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "agcv/sdp/eigen.hpp"
#include "agcv/sdp/sdpa.hpp"
#include "agcv/sdp/solver.hpp"

using namespace agcv::sdp;

namespace {

// Builds min c^T y s.t. A y + b >= 0 (componentwise) as a diagonal SDP of 1x1 blocks.
SdpProblem diagonal_sdp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    SdpProblem p(static_cast<std::size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        p.set_cost(static_cast<std::size_t>(i), c(i));
    }
    const std::size_t blk = p.add_block(a.rows());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        p.add_entry(blk, SdpProblem::npos, r, r, b(r));
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            p.add_entry(blk, static_cast<std::size_t>(k), r, r, a(r, k));
        }
    }
    return p;
}

// Brute-force LP optimum over all vertices of {y : A y + b >= 0} in R^3.
double lp_by_vertices(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    double best = std::numeric_limits<double>::infinity();
    const Eigen::Index m = a.rows();
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = i + 1; j < m; ++j) {
            for (Eigen::Index k = j + 1; k < m; ++k) {
                Eigen::Matrix3d sys;
                sys << a.row(i), a.row(j), a.row(k);
                if (std::abs(sys.determinant()) < 1e-10) {
                    continue;
                }
                const Eigen::Vector3d rhs(-b(i), -b(j), -b(k));
                const Eigen::Vector3d y = sys.fullPivLu().solve(rhs);
                if (((a * y + b).array() >= -1e-9).all()) {
                    best = std::min(best, c.dot(y));
                }
            }
        }
    }
    return best;
}

} // namespace

TEST_CASE("minimize y subject to [[y,1],[1,y]] psd") {
    SdpProblem p(1);
    p.set_cost(0, 1.0);
    const std::size_t b = p.add_block(2);
    p.add_entry(b, SdpProblem::npos, 0, 1, 1.0);
    p.add_entry(b, 0, 0, 0, 1.0);
    p.add_entry(b, 0, 1, 1, 1.0);
    const auto sol = solve(p);
    REQUIRE(sol.status == Status::Optimal);
    CHECK(sol.y(0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.min_block_eigenvalue >= -1e-7);
    CHECK(sol.duality_gap <= 1e-8);
}

TEST_CASE("sign contradiction through an equality is infeasible") {
    SdpProblem p(1);
    const std::size_t b = p.add_block(1);
    p.add_entry(b, 0, 0, 0, 1.0);
    p.add_equality(Eigen::VectorXd::Ones(1), -1.0);
    CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("constant identity block without variables is feasible") {
    SdpProblem p(0);
    p.add_block(Eigen::MatrixXd::Identity(2, 2));
    const auto sol = solve(p);
    CHECK(sol.status == Status::Feasible);
    CHECK(sol.objective == 0.0);

    SdpProblem q(0);
    q.add_block(-Eigen::MatrixXd::Identity(2, 2));
    CHECK(solve(q).status == Status::Infeasible);
}

TEST_CASE("infeasible LMI is detected") {
    // [[y, 1], [1, -y]] has determinant -y^2 - 1 < 0.
    SdpProblem p(1);
    const std::size_t b = p.add_block(2);
    p.add_entry(b, SdpProblem::npos, 0, 1, 1.0);
    p.add_entry(b, 0, 0, 0, 1.0);
    p.add_entry(b, 0, 1, 1, -1.0);
    CHECK(solve(p).status == Status::Infeasible);
}

TEST_CASE("unbounded objective is detected") {
    SdpProblem p(1);
    p.set_cost(0, -1.0);
    const std::size_t b = p.add_block(1);
    p.add_entry(b, 0, 0, 0, 1.0);
    CHECK(solve(p).status == Status::Unbounded);
}

TEST_CASE("min_eigenvalue") {
    CHECK(min_eigenvalue(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
    Eigen::MatrixXd swap(2, 2);
    swap << 0, 1, 1, 0;
    CHECK(min_eigenvalue(swap) == doctest::Approx(-1.0));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    for (int k = 0; k < 20; ++k) {
        Eigen::MatrixXd a(6, 4);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            a.data()[i] = g(rng);
        }
        CHECK(min_eigenvalue(a.transpose() * a) >= -1e-9);
    }
    Eigen::MatrixXd asym(2, 2);
    asym << 0, 1, 0, 0;
    CHECK_THROWS_AS(min_eigenvalue(asym), std::invalid_argument);
}

TEST_CASE("asymmetric coefficient matrices are rejected") {
    SdpProblem p(1);
    p.add_block(2);
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 3, 4;
    CHECK_THROWS_AS(p.set_coefficient(0, 0, m), std::invalid_argument);
}

TEST_CASE("diagonal SDPs agree with LP vertex enumeration") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int extra = 5;
        Eigen::MatrixXd a(6 + extra, 3);
        Eigen::VectorXd b(6 + extra);
        a.topRows(6) << Eigen::Matrix3d::Identity(), -Eigen::Matrix3d::Identity();
        b.head(6).setConstant(5.0);
        for (int r = 6; r < 6 + extra; ++r) {
            a.row(r) << u(rng), u(rng), u(rng);
            b(r) = 1.0 + std::abs(u(rng));
        }
        const Eigen::Vector3d c(u(rng), u(rng), u(rng));
        const auto sol = solve(diagonal_sdp(a, b, c));
        REQUIRE(sol.status == Status::Optimal);
        CHECK(std::abs(sol.objective - lp_by_vertices(a, b, c)) <= 1e-6);
    }
}

TEST_CASE("weak duality and determinism on a random SDP") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    SdpProblem p(4);
    const std::size_t b = p.add_block(Eigen::MatrixXd::Identity(4, 4) * 3.0);
    for (std::size_t k = 0; k < 4; ++k) {
        Eigen::MatrixXd m(4, 4);
        for (Eigen::Index i = 0; i < m.size(); ++i) {
            m.data()[i] = g(rng);
        }
        p.set_coefficient(b, k, m + m.transpose());
        p.set_cost(k, g(rng));
    }
    const auto s1 = solve(p);
    const auto s2 = solve(p);
    REQUIRE(s1.status == Status::Optimal);
    CHECK(s1.iterations == s2.iterations);
    CHECK(s1.y == s2.y);
    CHECK(s1.objective == s2.objective);
    CHECK(s1.duality_gap >= 0.0);
}

TEST_CASE("dimension cap") {
    SdpProblem p(1);
    p.add_block(Eigen::MatrixXd::Identity(5, 5));
    SolverSettings s;
    s.max_dimension = 4;
    CHECK_THROWS_AS(solve(p, s), std::length_error);
}

TEST_CASE("SDPA export round-trips") {
    SdpProblem p(2);
    p.set_cost(0, 1.0);
    p.set_cost(1, -0.5);
    const std::size_t b = p.add_block(2);
    p.add_entry(b, SdpProblem::npos, 0, 1, 1.0 / 3.0);
    p.add_entry(b, 0, 0, 0, 1.0);
    p.add_entry(b, 1, 1, 1, 2.0);
    p.add_equality(Eigen::Vector2d(1.0, 1.0), 0.7);
    const std::string text = to_sdpa(p);
    const SdpProblem back = from_sdpa(text);
    CHECK(to_sdpa(back) == text);
    CHECK(back.equalities().size() == 1);
    CHECK(back.blocks()[0].constant(0, 1) == 1.0 / 3.0);
    const auto s1 = solve(p);
    const auto s2 = solve(back);
    CHECK(s1.status == s2.status);
    CHECK(s1.objective == doctest::Approx(s2.objective));

    const SdpProblem tolerant = from_sdpa("* comment\n1 1\n{2}\n(1.0)\n0,1,1,2,-1.0\n1 1 1 1 1.0\n1 1 2 2 1.0\n");
    CHECK(tolerant.blocks().size() == 1);
    CHECK(tolerant.blocks()[0].constant(0, 1) == 1.0);
    CHECK_THROWS(from_sdpa("1 1\n2\n1\n0 3 1 1 1.0\n"));
}
