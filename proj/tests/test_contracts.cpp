// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <random>
#include <string>

#include "doctest.h"

#include "agcv/app/examples.hpp"
#include "agcv/app/model_file.hpp"
#include "agcv/contracts/interconnection.hpp"
#include "agcv/contracts/kv.hpp"
#include "agcv/contracts/normalization.hpp"
#include "agcv/poly/parse.hpp"

using namespace agcv;

namespace {

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
        s.replace(pos, from.size(), to);
    }
    return s;
}

const char* kTwoNodeCycle = R"(
[variables]
names = ["x1", "x2"]

[subsystem.1]
state = ["x1"]
outputs = ["x1"]
output_map = ["x1"]
dynamics = ["-x1 + 0.1*x2"]
initial_set = ["1 - x1^2"]
safe_region = ["4 - x1^2"]
inputs.2 = ["x2"]
bounds.2 = ["4 - x2^2"]

[subsystem.2]
state = ["x2"]
outputs = ["x2"]
output_map = ["x2"]
dynamics = ["-2*x2 + 0.1*x1"]
initial_set = ["1 - x2^2"]
safe_region = ["4 - x2^2"]
inputs.1 = ["x1"]
bounds.1 = ["4 - x1^2"]

[edges]
1 -> 2
2 -> 1
)";

} // namespace

TEST_CASE("kv documents round-trip") {
    const std::string text = R"(# comment
top = 1
name = "a b # not a comment"

[section.one]
list = [1, 2.5,
        -3e-2]   # trailing
names = ["x", "y"]
flag = true
1 -> 2
)";
    const KvDocument doc = KvDocument::parse(text);
    REQUIRE(doc.sections().size() == 2);
    CHECK(doc.root().get_int("top") == 1);
    CHECK(doc.root().get_string("name") == "a b # not a comment");
    const KvSection* s = doc.find("section.one");
    REQUIRE(s != nullptr);
    CHECK(s->get_doubles("list") == std::vector<double>{1, 2.5, -3e-2});
    CHECK(s->get_strings("names") == std::vector<std::string>{"x", "y"});
    CHECK(s->get_bool("flag"));
    REQUIRE(s->bare.size() == 1);
    CHECK(s->bare.front().text == "1 -> 2");

    const std::string written = doc.write();
    CHECK(KvDocument::parse(written).write() == written);
}

TEST_CASE("kv numbers print shortest round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 200; ++i) {
        const double v = u(rng) / (1 + i);
        CHECK(std::stod(kv_number(v)) == v);
    }
}

TEST_CASE("kv errors carry line and column") {
    auto position = [](const std::string& text) {
        try {
            (void)KvDocument::parse(text);
        } catch (const KvError& e) {
            return std::pair{e.line(), e.column()};
        }
        return std::pair{0, 0};
    };
    CHECK(position("a = 1\nb = \"open\n").first == 2);
    CHECK(position("a = 1\n[broken\n").first == 2);
    CHECK(position("a = [1, 2\n").first >= 1);
    const auto dup = position("a = 1\na = 2\n");
    CHECK(dup.first == 2);
    CHECK(dup.second >= 1);
}

TEST_CASE("fnv1a64 matches reference vectors") {
    CHECK(fnv1a64_hex("") == "cbf29ce484222325");
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("normalization maps are inverse") {
    VariableTable t;
    const Polynomial p = parse_polynomial("3*x^2*y - x + 2*y^3 - 7", t);
    Normalization n;
    n.axes[t.at("x")] = {1.5, 0.25};
    n.axes[t.at("y")] = {-2.0, 3.0};
    const Polynomial back = n.to_original(n.to_normalized(p));
    CHECK((back - p).max_abs_coefficient() <= 1e-9);

    // dynamics transform: dz/dt = f(c + s z) / s
    const PolynomialVector f{parse_polynomial("-x + y^2", t), parse_polynomial("x*y", t)};
    const std::vector<VarId> state{t.at("x"), t.at("y")};
    const PolynomialVector g = n.dynamics(f, state);
    const std::vector<double> z{0.3, -0.7};
    const std::vector<double> x{1.5 + 0.25 * 0.3, -2.0 + 3.0 * -0.7};
    CHECK(evaluate(g[0], z) == doctest::Approx(evaluate(f[0], x) / 0.25));
    CHECK(evaluate(g[1], z) == doctest::Approx(evaluate(f[1], x) / 3.0));
}

TEST_CASE("superlevel geometry of an ellipse") {
    VariableTable t;
    const PolynomialVector g{parse_polynomial("4 - (x - 1)^2 - 4*(y + 2)^2", t)};
    const std::vector<VarId> vars{t.at("x"), t.at("y")};
    const SetGeometry geo = analyze_superlevel(g, vars);
    REQUIRE(geo.bounded);
    REQUIRE_FALSE(geo.empty);
    CHECK(geo.center[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(geo.center[1] == doctest::Approx(-2.0).epsilon(1e-4));
    CHECK(geo.upper[0] == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(geo.lower[1] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(geo.peak == doctest::Approx(4.0).epsilon(1e-6));

    const SetGeometry empty = analyze_superlevel({parse_polynomial("-1 - x^2", t)}, std::vector<VarId>{t.at("x")});
    CHECK(empty.empty);
}

TEST_CASE("examples validate and classify") {
    const auto platoon = app::parse_model(app::platooning_model(3));
    CHECK(classify(platoon.system) == GraphClass::Acyclic);
    CHECK(platoon.system.subsystems.size() == 3);
    CHECK(platoon.system.sources.size() == 1);

    for (const int n : {3, 4, 10}) {
        const auto rooms = app::parse_model(app::rooms_model(n));
        CHECK(classify(rooms.system) == GraphClass::Homogeneous);
        CHECK(rooms.system.edges.size() == static_cast<std::size_t>(2 * n));
    }
    CHECK_THROWS(app::rooms_model(2));
    CHECK_THROWS(app::platooning_model(0));
}

TEST_CASE("classification is invariant under variable renaming and ordering") {
    std::string text = app::rooms_model(4);
    for (int i = 1; i <= 4; ++i) {
        text = replace_all(text, "x" + std::to_string(i), "temp_" + std::to_string(5 - i));
    }
    text = replace_all(text, R"(names = ["temp_4", "temp_3", "temp_2", "temp_1"])",
                       R"(names = ["temp_1", "temp_2", "temp_3", "temp_4"])");
    const auto m = app::parse_model(text);
    CHECK(classify(m.system) == GraphClass::Homogeneous);
    const auto& s1 = m.system.subsystems.at(1);
    const auto& s3 = m.system.subsystems.at(3);
    CHECK(structural_signature(s1, m.system.variables) == structural_signature(s3, m.system.variables));

    // renaming maps subsystem 1 onto subsystem 3 exactly
    const auto map = renaming(s1, s3);
    CHECK(rename(s1.dynamics, map)[0] == s3.dynamics[0]);
}

TEST_CASE("heterogeneous cycle is general") {
    const auto m = app::parse_model(kTwoNodeCycle);
    CHECK(has_cycle(m.system));
    CHECK(classify(m.system) == GraphClass::General);

    // same dynamics on both nodes: homogeneous
    const auto h = app::parse_model(replace_all(kTwoNodeCycle, "-2*x2 + 0.1*x1", "-x2 + 0.1*x1"));
    CHECK(classify(h.system) == GraphClass::Homogeneous);
}

TEST_CASE("validation reports structural problems") {
    auto m = app::parse_model(kTwoNodeCycle);
    m.system.edges.insert({1, 7});
    CHECK_FALSE(validate_interconnection(m.system).empty());

    // a model whose edges disagree with the declared inputs is rejected at parse time
    const std::string bad = replace_all(kTwoNodeCycle, "2 -> 1\n", "");
    CHECK_THROWS_AS(app::parse_model(bad), KvError);
}

TEST_CASE("assumption projection shifts the bounds") {
    const auto m = app::parse_model(app::platooning_model(3));
    const Subsystem& child = m.system.subsystems.at(2);
    const PolynomialVector a = project_assumption(child, 1, 1.0);
    REQUIRE(a.size() == 1);
    VariableTable t = m.system.variables;
    CHECK((a[0] - parse_polynomial("1.439 - v1^2", t)).max_abs_coefficient() <= 1e-12);
    const std::vector<double> pt(m.system.variables.size(), 0.0);
    CHECK(min_component(a, pt) == doctest::Approx(1.439));
}

TEST_CASE("model parse errors point at the offending text") {
    const std::string text = replace_all(app::platooning_model(3), R"(bounds.2 = ["2.439 - v2^2"])",
                                         R"(bounds.2 = ["2.439 - w9^2"])");
    try {
        (void)app::parse_model(text);
        FAIL("expected a parse error");
    } catch (const KvError& e) {
        CHECK(e.line() > 1);
        CHECK(e.column() > 1);
    }
    CHECK_THROWS_AS(app::parse_model("[subsystem.1]\nunknown_key = 1\n"), KvError);
}
