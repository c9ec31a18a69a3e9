// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include "doctest.h"

#include "agcv/app/commands.hpp"
#include "agcv/app/examples.hpp"
#include "agcv/app/model_file.hpp"
#include "agcv/app/simulate.hpp"
#include "agcv/app/sweep.hpp"
#include "agcv/contracts/checker.hpp"

using namespace agcv;
using namespace agcv::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "agcv_test_app";
    fs::create_directories(dir);
    return dir / name;
}

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

template <class F>
Run capture(F&& f) {
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = f(out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

const char* kScalar = R"(
[variables]
names = ["x"]

[subsystem.1]
state = ["x"]
dynamics = ["-x"]
initial_set = ["1 - x^2"]
safe_region = ["4 - x^2"]
)";

} // namespace

TEST_CASE("rk45 against closed-form solutions") {
    // y' = -y
    std::vector<double> y{1.0};
    const auto st = integrate_rk45([](double, const std::vector<double>& v, std::vector<double>& d) { d[0] = -v[0]; },
                                   0.0, 5.0, y, 1e-10);
    CHECK(y[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-8));
    CHECK(st.accepted > 0);

    // harmonic oscillator over one period
    std::vector<double> z{1.0, 0.0};
    integrate_rk45(
        [](double, const std::vector<double>& v, std::vector<double>& d) {
            d[0] = v[1];
            d[1] = -v[0];
        },
        0.0, 2 * M_PI, z, 1e-10);
    CHECK(std::abs(z[0] - 1.0) <= 1e-7);
    CHECK(std::abs(z[1]) <= 1e-7);
}

TEST_CASE("range parsing") {
    CHECK(parse_range("0:0.25:2").size() == 9);
    CHECK(parse_range("4, 2").front() == 2.0);
    CHECK(parse_range("1.5").size() == 1);
    CHECK_THROWS_AS(parse_range(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("1:0:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_range("a,b"), std::invalid_argument);
    CHECK(sweep_parameter_from_string("gain_a") == SweepParameter::GainA);
    CHECK_THROWS(sweep_parameter_from_string("epsilon"));
}

TEST_CASE("model hash follows the bytes") {
    const std::string a = platooning_model(3);
    CHECK(parse_model(a).hash == model_hash(a));
    CHECK(model_hash(a) != model_hash(a + "\n"));
}

TEST_CASE("config overlay and unknown keys") {
    NegotiationConfig cfg;
    SimulationSettings sim;
    const KvDocument doc = KvDocument::parse("gain_a = 2\nhorizon = 7\nalgorithm = \"general\"\n");
    apply_config(doc.root(), cfg, sim);
    CHECK(cfg.synthesis.gain_a == 2.0);
    CHECK(sim.horizon == 7.0);
    CHECK(cfg.algorithm == Algorithm::General);
    CHECK_THROWS_AS(apply_config(KvDocument::parse("gain = 2\n").root(), cfg, sim), KvError);
}

TEST_CASE("example command") {
    const Run r = capture([](std::ostream& o, std::ostream& e) { return cmd_example("rooms", 4, {}, {}, o, e); });
    CHECK(r.code == kExitTrue);
    CHECK(r.out == rooms_model(4));
    const Run bad = capture([](std::ostream& o, std::ostream& e) { return cmd_example("rooms", 2, {}, {}, o, e); });
    CHECK(bad.code == kExitUsage);
    const Run unknown = capture([](std::ostream& o, std::ostream& e) { return cmd_example("zoo", 3, {}, {}, o, e); });
    CHECK(unknown.code == kExitUsage);
}

TEST_CASE("verify, check and tampering") {
    const fs::path model = scratch("scalar.model");
    write_file_atomic(model, kScalar);
    const Run v = capture([&](std::ostream& o, std::ostream& e) { return cmd_verify(model, {}, o, e); });
    CHECK(v.code == kExitTrue);
    CHECK(v.out.find("verdict True") != std::string::npos);
    REQUIRE(fs::exists(sibling(model, ".cert")));
    REQUIRE(fs::exists(sibling(model, ".trace")));

    const fs::path cert = sibling(model, ".cert");
    const Run ok = capture([&](std::ostream& o, std::ostream& e) { return cmd_check(cert, model, {}, o, e); });
    CHECK(ok.code == kExitTrue);

    SUBCASE("perturbed gram entry fails the residual check") {
        const auto m = parse_model(kScalar);
        Certificate c = read_certificate(read_file(cert), m.system.variables);
        auto& grams = c.contracts.at(1).evidence.grams;
        const auto it = std::find_if(grams.begin(), grams.end(),
                                     [](const sos::GramEvidence& g) { return g.label == "cbf"; });
        REQUIRE(it != grams.end());
        it->gram(0, 0) += 1e-2;
        const fs::path bad = scratch("scalar_bad.cert");
        write_file_atomic(bad, write_certificate(c, m.system.variables));
        const Run r = capture([&](std::ostream& o, std::ostream& e) { return cmd_check(bad, model, {}, o, e); });
        CHECK(r.code == kExitCheckFailed);
        CHECK(r.out.find("FAIL") != std::string::npos);
    }
    SUBCASE("edited model is a hash mismatch") {
        const fs::path edited = scratch("scalar_edited.model");
        write_file_atomic(edited, std::string(kScalar) + "\n# edited\n");
        const Run r = capture([&](std::ostream& o, std::ostream& e) { return cmd_check(cert, edited, {}, o, e); });
        CHECK(r.code == kExitUsage);
        CHECK(r.err.find("hash mismatch") != std::string::npos);
    }
}

TEST_CASE("verify reports model errors with positions") {
    const Run missing = capture(
        [](std::ostream& o, std::ostream& e) { return cmd_verify(scratch("missing.model"), {}, o, e); });
    CHECK(missing.code == kExitUsage);

    const fs::path model = scratch("broken.model");
    write_file_atomic(model, "[variables]\nnames = [\"x\"]\n\n[subsystem.1]\nstate = [\"x\"]\ndynamics = [\"-x +\"]\n");
    const Run r = capture([&](std::ostream& o, std::ostream& e) { return cmd_verify(model, {}, o, e); });
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("broken.model:6:") != std::string::npos);
}

TEST_CASE("infeasible model gives verdict False") {
    const fs::path model = scratch("unstable.model");
    std::string text = kScalar;
    text.replace(text.find("[\"-x\"]"), 6, "[\"x\"]");
    write_file_atomic(model, text);
    const Run r = capture([&](std::ostream& o, std::ostream& e) { return cmd_verify(model, {}, o, e); });
    CHECK(r.code == kExitFalse);
}

TEST_CASE("simulation") {
    const auto m = parse_model(platooning_model(3));
    SimulationOptions o;
    o.samples = 20;
    o.horizon = 20.0;
    o.seed = 5;
    const SimulationReport a = simulate(m.system, {}, o);
    const SimulationReport b = simulate(m.system, {}, o);
    CHECK(write_report(a, m.system, o) == write_report(b, m.system, o));
    CHECK(write_plot_csv(a, m.system, {}) == write_plot_csv(b, m.system, {}));
    CHECK(a.violations == 0);
    for (const auto& tr : a.trajectories) {
        CHECK(tr.times.back() == 20.0);
        CHECK(tr.min_safe_margin.size() == 3);
    }

    SUBCASE("horizon zero keeps only the initial point") {
        o.horizon = 0.0;
        const SimulationReport z = simulate(m.system, {}, o);
        for (const auto& tr : z.trajectories) {
            CHECK(tr.times.size() == 1);
            CHECK(tr.steps == 0);
        }
    }
    SUBCASE("thin initial set exhausts the draw budget") {
        const auto s = parse_model(R"(
[variables]
names = ["x", "y"]

[subsystem.1]
state = ["x", "y"]
dynamics = ["-x", "-y"]
initial_set = ["1 - x^2 - y^2", "0.000000000001 - x^2*y^2"]
safe_region = ["4 - x^2 - y^2"]
)");
        o.max_draws = 1000;
        CHECK_THROWS_AS(simulate(s.system, {}, o), std::runtime_error);
    }
}

TEST_CASE("sweep summary rows") {
    const auto m = parse_model(kScalar);
    const Subsystem& s = m.system.subsystems.at(1);
    const SweepResult one = sweep(s, SweepParameter::Zeta, {0.5}, m.config.synthesis, false, 2e-3);
    CHECK(one.rows.size() == 1);
    const std::string csv = write_sweep_csv(one);
    CHECK(csv.rfind("parameter,delta_star,zeta_star,verdict\n", 0) == 0);
    CHECK(csv.find("# monotone,true") != std::string::npos);

    // a zeta beyond the initial set's reach is infeasible
    const SweepResult r = sweep(s, SweepParameter::Zeta, {0.0, 3.5}, m.config.synthesis, false, 2e-3);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].feasible);
    CHECK_FALSE(r.rows[1].feasible);
}
