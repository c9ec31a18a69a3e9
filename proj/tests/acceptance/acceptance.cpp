// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "agcv/app/examples.hpp"
#include "agcv/app/model_file.hpp"
#include "agcv/app/simulate.hpp"
#include "agcv/app/sweep.hpp"
#include "agcv/contracts/checker.hpp"
#include "agcv/negotiation/negotiation.hpp"
#include "agcv/poly/parse.hpp"
#include "agcv/sdp/sdpa.hpp"
#include "agcv/sos/compile.hpp"

using namespace agcv;

namespace {

// reference values and tolerances
constexpr double kPlatoonDelta = 1.704;
constexpr double kPlatoonZeta = 1.1147;
constexpr double kPlatoonRootRadius2 = 0.019;
constexpr double kRelTol = 0.10;
constexpr double kRootRelTol = 0.25;
constexpr double kPlatoonSeconds = 60.0;
constexpr double kRoomsDelta = 20.575;
constexpr int kRoomsIterations = 2;
constexpr double kRoomsSeconds = 30.0;
constexpr double kBarrierMargin = -1e-6;
constexpr int kSimSamples = 200;
constexpr double kSimHorizon = 50.0;
constexpr int kSimSeeds = 5;
constexpr double kSquareTol = 1e-4;
constexpr double kLpTol = 1e-6;
constexpr int kLpTrials = 50;

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool within(double value, double reference, double rel) {
    return std::abs(value - reference) <= rel * std::abs(reference);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::optional<double> value_of(const TraceRecord& r, const std::string& key) {
    for (const auto& [k, v] : r.values) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

struct Verified {
    app::ModelFile model;
    Certificate cert;
    double seconds = 0.0;
};

Verified verify(const std::string& text) {
    Verified v;
    v.model = app::parse_model(text);
    const auto t0 = std::chrono::steady_clock::now();
    v.cert = run(v.model.system, v.model.config);
    v.seconds = seconds_since(t0);
    v.cert.model_hash = v.model.hash;
    return v;
}

std::vector<Verified> true_verdicts;

void criterion_platooning() {
    const Verified v = verify(app::platooning_model(3));
    std::ostringstream d;
    bool pass = v.cert.verdict;
    d << "verdict " << (v.cert.verdict ? "True" : "False");
    if (v.cert.contracts.contains(3)) {
        const Contract& c = v.cert.contracts.at(3);
        const bool dp = within(c.delta, kPlatoonDelta, kRelTol);
        const bool zp = within(c.zeta, kPlatoonZeta, kRelTol);
        pass = pass && dp && zp;
        d << "; delta3* " << fmt(c.delta) << " vs " << kPlatoonDelta << (dp ? " ok" : " out of +-10%");
        d << "; zeta3* " << fmt(c.zeta) << " vs " << kPlatoonZeta << (zp ? " ok" : " out of +-10%");
    } else {
        pass = false;
        d << "; no contract for vehicle 3";
    }
    std::optional<double> root;
    for (const auto& r : v.cert.trace) {
        if (r.operation == "root_assumption") {
            root = value_of(r, "assumption_peak");
        }
    }
    if (root) {
        const bool rp = within(*root, kPlatoonRootRadius2, kRootRelTol);
        pass = pass && rp;
        d << "; root radius^2 " << fmt(*root) << " vs " << kPlatoonRootRadius2 << (rp ? " ok" : " out of +-25%");
    } else {
        pass = false;
        d << "; no root assumption recorded";
    }
    const bool tp = v.seconds <= kPlatoonSeconds;
    pass = pass && tp;
    d << "; runtime " << fmt(v.seconds) << " s";
    report(1, pass, "platooning: " + d.str());
    if (v.cert.verdict) {
        true_verdicts.push_back(v);
    }
}

void criterion_rooms() {
    bool pass = true;
    std::ostringstream d;
    std::optional<std::pair<bool, int>> first;
    for (const int n : {4, 10, 50}) {
        const Verified v = verify(app::rooms_model(n));
        d << "N=" << n << ": verdict " << (v.cert.verdict ? "True" : "False") << ", iterations " << v.cert.iterations
          << ", " << fmt(v.seconds) << " s";
        const bool ok = v.cert.verdict && v.cert.iterations == kRoomsIterations;
        pass = pass && ok;
        if (!first) {
            first = std::pair{v.cert.verdict, v.cert.iterations};
        } else if (*first != std::pair{v.cert.verdict, v.cert.iterations}) {
            pass = false;
            d << " (differs from N=4)";
        }
        if (n == 50 && v.seconds > kRoomsSeconds) {
            pass = false;
            d << " (over " << kRoomsSeconds << " s)";
        }
        if (n == 4) {
            for (const auto& r : v.cert.trace) {
                if (r.operation == "node_update" && value_of(r, "iteration") == 1.0) {
                    const double delta = value_of(r, "delta").value_or(NAN);
                    const double zeta = value_of(r, "zeta").value_or(NAN);
                    const bool dp = within(delta, kRoomsDelta, kRelTol);
                    const bool zp = zeta == 0.0;
                    pass = pass && dp && zp;
                    d << " [iteration-1 delta* " << fmt(delta) << " vs " << kRoomsDelta << (dp ? " ok" : " out of +-10%")
                      << ", zeta* " << fmt(zeta) << (zp ? " ok" : " not 0") << "]";
                    break;
                }
            }
            if (v.cert.verdict) {
                true_verdicts.push_back(v);
            } else if (!v.cert.reason.empty()) {
                d << " {" << v.cert.reason << "}";
            }
        }
        d << "; ";
    }
    report(2, pass, "rooms: " + d.str());
}

void criterion_soundness() {
    bool pass = true;
    std::ostringstream d;
    if (true_verdicts.empty()) {
        d << "no True verdicts to check";
    }
    for (const auto& v : true_verdicts) {
        const CheckReport rep = check_certificate(v.cert, v.model.system);
        pass = pass && rep.passed();
        d << v.model.name << ": check " << rep.checks << " conditions, " << rep.failures.size() << " failures";
        int violations = 0;
        double min_h = std::numeric_limits<double>::infinity();
        for (int seed = 1; seed <= kSimSeeds; ++seed) {
            app::SimulationOptions o;
            o.samples = kSimSamples;
            o.horizon = kSimHorizon;
            o.seed = static_cast<std::uint64_t>(seed);
            const auto sim = app::simulate(v.model.system, v.cert.contracts, o);
            violations += sim.violations;
            for (const auto& tr : sim.trajectories) {
                for (const auto& [id, h] : tr.min_barrier) {
                    min_h = std::min(min_h, h);
                }
            }
        }
        const bool sp = violations == 0 && min_h >= kBarrierMargin;
        pass = pass && sp;
        d << "; " << kSimSeeds << "x" << kSimSamples << " trajectories: " << violations
          << " violations, min barrier " << fmt(min_h) << "; ";
    }
    report(3, pass && !true_verdicts.empty(), d.str());
}

void criterion_monotonicity() {
    const auto m = app::parse_model(app::platooning_model(3));
    const Subsystem& s = m.system.subsystems.at(3);
    const auto& cfg = m.config.synthesis;
    const double slack = 2.0 * cfg.bisection_tol;
    const auto z = app::sweep(s, app::SweepParameter::Zeta, app::parse_range("0:0.25:2"), cfg, false, slack);
    const auto dl = app::sweep(s, app::SweepParameter::Delta, {0.0, 0.5, 1.0}, cfg, true, slack);
    bool feasible = true;
    for (const auto* r : {&z, &dl}) {
        for (const auto& row : r->rows) {
            feasible = feasible && row.feasible && row.delta && row.zeta;
        }
    }
    std::ostringstream d;
    d << "zeta sweep (" << z.rows.size() << " points) " << z.ordering << ": " << (z.monotone ? "ok" : "violated")
      << ", max violation " << fmt(z.max_violation) << "; delta sweep (" << dl.rows.size() << " points) "
      << dl.ordering << ": " << (dl.monotone ? "ok" : "violated") << ", max violation " << fmt(dl.max_violation);
    if (!feasible) {
        d << "; some grid points infeasible";
    }
    report(4, z.monotone && dl.monotone && feasible, d.str());
}

// min c^T y s.t. A y + b >= 0 as 1x1 blocks
sdp::SdpProblem diagonal_sdp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    sdp::SdpProblem p(static_cast<std::size_t>(c.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        p.set_cost(static_cast<std::size_t>(i), c(i));
    }
    const std::size_t blk = p.add_block(a.rows());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        p.add_entry(blk, sdp::SdpProblem::npos, r, r, b(r));
        for (Eigen::Index k = 0; k < a.cols(); ++k) {
            p.add_entry(blk, static_cast<std::size_t>(k), r, r, a(r, k));
        }
    }
    return p;
}

// brute-force LP optimum over the vertices of {y in R^3 : A y + b >= 0}
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
                const Eigen::Vector3d y = sys.fullPivLu().solve(Eigen::Vector3d(-b(i), -b(j), -b(k)));
                if (((a * y + b).array() >= -1e-9).all()) {
                    best = std::min(best, c.dot(y));
                }
            }
        }
    }
    return best;
}

void criterion_oracles() {
    std::ostringstream d;
    bool pass = true;

    VariableTable t;
    const Polynomial x = parse_polynomial("x", t);
    sos::SosProgram sq;
    const sos::LinearExpr c = sq.new_scalar("c");
    sq.add_sos("square", sos::LinearExpr(x * x - 2.0 * x) + c, {t.at("x")});
    sq.minimize(c);
    const auto sr = sos::solve(sq);
    const double cstar = sr.feasible() ? sr.extraction.scalars.at("c") : NAN;
    const bool sp = std::abs(cstar - 1.0) <= kSquareTol;
    pass = pass && sp;
    d << "square c* " << fmt(cstar) << (sp ? " ok" : " off");

    const Polynomial motzkin = parse_polynomial("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", t);
    sos::SosProgram mp;
    mp.add_sos("motzkin", sos::LinearExpr(motzkin), {t.at("x"), t.at("y")});
    const auto mr = sos::solve(mp);
    const bool mpass = !mr.feasible();
    pass = pass && mpass;
    d << "; Motzkin " << (mpass ? "rejected" : "accepted") << " (" << sdp::to_string(mr.status) << ")";

    std::mt19937_64 rng(2025);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    int solved = 0;
    for (int trial = 0; trial < kLpTrials; ++trial) {
        const int extra = 5;
        Eigen::MatrixXd a(6 + extra, 3);
        Eigen::VectorXd b(6 + extra);
        a.topRows(6) << Eigen::Matrix3d::Identity(), -Eigen::Matrix3d::Identity();
        b.head(6).setConstant(5.0);
        for (int r = 6; r < 6 + extra; ++r) {
            a.row(r) << u(rng), u(rng), u(rng);
            b(r) = 1.0 + std::abs(u(rng));
        }
        const Eigen::Vector3d cost(u(rng), u(rng), u(rng));
        const auto sol = sdp::solve(diagonal_sdp(a, b, cost));
        if (sol.status == sdp::Status::Optimal) {
            ++solved;
            worst = std::max(worst, std::abs(sol.objective - lp_by_vertices(a, b, cost)));
        }
    }
    const bool lp = solved == kLpTrials && worst <= kLpTol;
    pass = pass && lp;
    d << "; diagonal SDPs " << solved << "/" << kLpTrials << " solved, worst gap " << fmt(worst);

    const sos::Compiled comp = sos::compile(mp);
    const std::string text = sdp::to_sdpa(comp.problem);
    const auto back = sdp::from_sdpa(text);
    const bool rt = sdp::to_sdpa(back) == text && sdp::solve(back).status == mr.status;
    pass = pass && rt;
    d << "; SDPA round-trip " << (rt ? "ok" : "mismatch");
    report(5, pass, d.str());
}

void criterion_determinism() {
    bool pass = true;
    std::ostringstream d;
    for (const auto& [name, text] :
         std::vector<std::pair<std::string, std::string>>{{"platooning", app::platooning_model(3)},
                                                          {"rooms", app::rooms_model(4)}}) {
        std::string cert;
        std::string trace;
        bool same = true;
        for (int rep = 0; rep < 3; ++rep) {
            const Verified v = verify(text);
            const std::string c = write_certificate(v.cert, v.model.system.variables);
            const std::string tr = write_trace(v.cert.trace);
            if (rep == 0) {
                cert = c;
                trace = tr;
            } else {
                same = same && c == cert && tr == trace;
            }
        }
        pass = pass && same;
        d << name << " " << (same ? "identical" : "differs") << " over 3 runs; ";
    }
    report(6, pass, d.str());
}

void guarded(int criterion, const std::function<void()>& f) {
    try {
        f();
    } catch (const std::exception& e) {
        report(criterion, false, std::string("exception: ") + e.what());
    }
}

} // namespace

int main() {
    guarded(1, criterion_platooning);
    guarded(2, criterion_rooms);
    guarded(3, criterion_soundness);
    guarded(4, criterion_monotonicity);
    guarded(5, criterion_oracles);
    guarded(6, criterion_determinism);
    std::printf("%d of 6 criteria failed\n", failures);
    return failures;
}
