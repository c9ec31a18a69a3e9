// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/app/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "agcv/contracts/kv.hpp"
#include "agcv/contracts/normalization.hpp"

namespace agcv::app {

OdeStats integrate_rk45(const OdeRhs& f, double t0, double t1, std::vector<double>& y, double tol,
                        const std::function<void(double, const std::vector<double>&)>& on_step) {
    // Dormand-Prince coefficients
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    OdeStats stats;
    const std::size_t n = y.size();
    if (t1 <= t0 || n == 0) {
        return stats;
    }
    std::array<std::vector<double>, 7> k;
    for (auto& v : k) {
        v.assign(n, 0.0);
    }
    std::vector<double> tmp(n), y5(n);
    double t = t0;
    double h = std::min(t1 - t0, 1e-2);
    f(t, y, k[0]);
    while (t < t1) {
        h = std::min(h, t1 - t);
        auto stage = [&](std::vector<double>& out, std::initializer_list<std::pair<int, double>> terms) {
            for (std::size_t i = 0; i < n; ++i) {
                double s = y[i];
                for (const auto& [j, a] : terms) {
                    s += h * a * k[static_cast<std::size_t>(j)][i];
                }
                out[i] = s;
            }
        };
        stage(tmp, {{0, a21}});
        f(t + c2 * h, tmp, k[1]);
        stage(tmp, {{0, a31}, {1, a32}});
        f(t + c3 * h, tmp, k[2]);
        stage(tmp, {{0, a41}, {1, a42}, {2, a43}});
        f(t + c4 * h, tmp, k[3]);
        stage(tmp, {{0, a51}, {1, a52}, {2, a53}, {3, a54}});
        f(t + c5 * h, tmp, k[4]);
        stage(tmp, {{0, a61}, {1, a62}, {2, a63}, {3, a64}, {4, a65}});
        f(t + h, tmp, k[5]);
        stage(y5, {{0, b1}, {2, b3}, {3, b4}, {4, b5}, {5, b6}});
        f(t + h, y5, k[6]);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e =
                h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] + e7 * k[6][i]);
            err = std::max(err, std::abs(e) / (1.0 + std::max(std::abs(y[i]), std::abs(y5[i]))));
        }
        if (!std::isfinite(err)) {
            err = std::numeric_limits<double>::infinity();
        }
        if (err <= tol) {
            t = (t1 - t - h <= 1e-15 * std::max(1.0, std::abs(t1))) ? t1 : t + h;
            y = y5;
            k[0] = k[6];
            ++stats.accepted;
            if (on_step) {
                on_step(t, y);
            }
        } else {
            ++stats.rejected;
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 5.0);
        h *= factor;
        if (h < 1e-14 * std::max(1.0, std::abs(t))) {
            throw std::runtime_error("integrator step size underflow at t = " + std::to_string(t));
        }
    }
    return stats;
}

namespace {

struct Layout {
    std::vector<VarId> state;
    std::vector<std::pair<SubsystemId, std::pair<std::size_t, std::size_t>>> ranges;
};

Layout layout_of(const Interconnection& sys) {
    Layout l;
    for (const auto& [id, s] : sys.subsystems) {
        const std::size_t b = l.state.size();
        l.state.insert(l.state.end(), s.state.begin(), s.state.end());
        l.ranges.push_back({id, {b, l.state.size()}});
    }
    return l;
}

class ClosedLoop {
  public:
    ClosedLoop(const Interconnection& sys, const Layout& layout) : sys_(sys), layout_(layout) {
        point_.assign(sys.variables.size(), 0.0);
    }

    // fills point_ with states, parent outputs and source values
    const std::vector<double>& point(const std::vector<double>& y) {
        for (std::size_t i = 0; i < y.size(); ++i) {
            point_[layout_.state[i]] = y[i];
        }
        for (const auto& [id, src] : sys_.sources) {
            for (std::size_t k = 0; k < src.outputs.size(); ++k) {
                point_[src.outputs[k]] = k < src.value.size() ? src.value[k] : 0.0;
            }
        }
        // outputs are functions of states only; compute before overwriting
        outputs_.clear();
        for (const auto& [id, s] : sys_.subsystems) {
            for (std::size_t k = 0; k < s.outputs.size(); ++k) {
                outputs_.emplace_back(s.outputs[k], evaluate(s.output_map[k], point_));
            }
        }
        for (const auto& [v, val] : outputs_) {
            point_[v] = val;
        }
        return point_;
    }

    void rhs(const std::vector<double>& y, std::vector<double>& dy) {
        const auto& pt = point(y);
        std::size_t i = 0;
        for (const auto& [id, s] : sys_.subsystems) {
            for (const auto& f : s.dynamics) {
                dy[i++] = evaluate(f, pt);
            }
        }
    }

  private:
    const Interconnection& sys_;
    const Layout& layout_;
    std::vector<double> point_;
    std::vector<std::pair<VarId, double>> outputs_;
};

std::vector<double> draw_initial(const Interconnection& sys, std::mt19937_64& rng, int max_draws) {
    std::vector<double> y;
    for (const auto& [id, s] : sys.subsystems) {
        const SetGeometry geo = analyze_superlevel(s.initial_set, s.state);
        if (geo.empty || !geo.bounded) {
            throw std::runtime_error("initial set of subsystem " + std::to_string(id) + " is empty or unbounded");
        }
        std::vector<std::uniform_real_distribution<double>> dist;
        for (std::size_t k = 0; k < s.state.size(); ++k) {
            dist.emplace_back(geo.center[k] - geo.lower[k], geo.center[k] + geo.upper[k]);
        }
        std::vector<double> x(s.state.size());
        bool found = false;
        for (int draw = 0; draw < max_draws && !found; ++draw) {
            for (std::size_t k = 0; k < x.size(); ++k) {
                x[k] = dist[k](rng);
            }
            found = min_over(s.initial_set, s.state, x) >= 0.0;
        }
        if (!found) {
            throw std::runtime_error("could not sample the initial set of subsystem " + std::to_string(id) +
                                     " within " + std::to_string(max_draws) + " draws");
        }
        y.insert(y.end(), x.begin(), x.end());
    }
    return y;
}

} // namespace

SimulationReport simulate(const Interconnection& sys, const std::map<SubsystemId, Contract>& contracts,
                          const SimulationOptions& options) {
    if (options.horizon < 0.0 || options.samples < 0 || options.output_points < 1) {
        throw std::invalid_argument("simulation needs horizon >= 0, samples >= 0 and output_points >= 1");
    }
    const Layout layout = layout_of(sys);
    SimulationReport report;
    report.state_vars = layout.state;
    std::mt19937_64 rng(options.seed);
    ClosedLoop loop(sys, layout);
    const OdeRhs f = [&](double, const std::vector<double>& y, std::vector<double>& dy) { loop.rhs(y, dy); };
    for (int n = 0; n < options.samples; ++n) {
        Trajectory tr;
        std::vector<double> y = draw_initial(sys, rng, options.max_draws);
        tr.initial = y;
        auto observe = [&](double t, const std::vector<double>& state, bool record) {
            const auto& pt = loop.point(state);
            for (const auto& [id, range] : layout.ranges) {
                const Subsystem& s = sys.subsystems.at(id);
                double q = std::numeric_limits<double>::infinity();
                for (const auto& p : s.safe_region) {
                    q = std::min(q, evaluate(p, pt));
                }
                auto [it, inserted] = tr.min_safe_margin.emplace(id, q);
                if (!inserted) {
                    it->second = std::min(it->second, q);
                }
                if (const auto c = contracts.find(id); c != contracts.end()) {
                    const double h = evaluate(c->second.barrier, pt);
                    auto [hit, hin] = tr.min_barrier.emplace(id, h);
                    if (!hin) {
                        hit->second = std::min(hit->second, h);
                    }
                }
            }
            if (record) {
                tr.times.push_back(t);
                tr.states.push_back(state);
            }
        };
        observe(0.0, y, true);
        if (options.horizon > 0.0) {
            const double dt = options.horizon / options.output_points;
            for (int k = 0; k < options.output_points; ++k) {
                const double t0 = k * dt;
                const double t1 = k + 1 == options.output_points ? options.horizon : (k + 1) * dt;
                const OdeStats st = integrate_rk45(f, t0, t1, y, options.sim_tol,
                                                   [&](double t, const std::vector<double>& s) {
                                                       if (t < t1) {
                                                           observe(t, s, false);
                                                       }
                                                   });
                tr.steps += st.accepted;
                tr.rejected += st.rejected;
                observe(t1, y, true);
            }
        }
        for (const auto& [id, m] : tr.min_safe_margin) {
            tr.violated = tr.violated || m < 0.0;
        }
        report.violations += tr.violated ? 1 : 0;
        report.trajectories.push_back(std::move(tr));
    }
    return report;
}

std::string write_report(const SimulationReport& report, const Interconnection& sys,
                         const SimulationOptions& options) {
    KvDocument doc;
    KvSection& root = doc.root();
    root.set_int("report_version", 1);
    root.set_int("trajectories", static_cast<long>(report.trajectories.size()));
    root.set_int("violations", report.violations);
    root.set("horizon", options.horizon);
    root.set("sim_tol", options.sim_tol);
    root.set("seed", std::to_string(options.seed));
    std::vector<std::string> names;
    for (const VarId v : report.state_vars) {
        names.push_back(sys.variables.name(v));
    }
    root.set("state", names);
    for (std::size_t n = 0; n < report.trajectories.size(); ++n) {
        const Trajectory& tr = report.trajectories[n];
        KvSection& sec = doc.add_section("trajectory." + std::to_string(n));
        sec.set("initial", tr.initial);
        sec.set_bool("violated", tr.violated);
        sec.set_int("steps", tr.steps);
        sec.set_int("rejected", tr.rejected);
        for (const auto& [id, m] : tr.min_safe_margin) {
            sec.set("min_safe_margin." + std::to_string(id), m);
        }
        for (const auto& [id, m] : tr.min_barrier) {
            sec.set("min_barrier." + std::to_string(id), m);
        }
    }
    return doc.write();
}

std::string write_plot_csv(const SimulationReport& report, const Interconnection& sys,
                           const std::map<SubsystemId, Contract>& contracts) {
    std::ostringstream os;
    os << "trajectory,time";
    for (const VarId v : report.state_vars) {
        os << "," << sys.variables.name(v);
    }
    for (const auto& [id, s] : sys.subsystems) {
        os << ",q_" << id;
    }
    for (const auto& [id, c] : contracts) {
        os << ",h_" << id;
    }
    os << "\n";
    std::vector<double> point(sys.variables.size(), 0.0);
    for (std::size_t n = 0; n < report.trajectories.size(); ++n) {
        const Trajectory& tr = report.trajectories[n];
        for (std::size_t k = 0; k < tr.times.size(); ++k) {
            for (std::size_t i = 0; i < report.state_vars.size(); ++i) {
                point[report.state_vars[i]] = tr.states[k][i];
            }
            os << n << "," << kv_number(tr.times[k]);
            for (const double x : tr.states[k]) {
                os << "," << kv_number(x);
            }
            for (const auto& [id, s] : sys.subsystems) {
                double q = std::numeric_limits<double>::infinity();
                for (const auto& p : s.safe_region) {
                    q = std::min(q, evaluate(p, point));
                }
                os << "," << kv_number(q);
            }
            for (const auto& [id, c] : contracts) {
                os << "," << kv_number(evaluate(c.barrier, point));
            }
            os << "\n";
        }
    }
    return os.str();
}

} // namespace agcv::app
