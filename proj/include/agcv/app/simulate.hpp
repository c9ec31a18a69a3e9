// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "agcv/contracts/contract.hpp"

namespace agcv::app {

struct SimulationOptions {
    int samples = 200;
    double horizon = 50.0;
    double sim_tol = 1e-8;
    std::uint64_t seed = 1;
    /// number of uniform output intervals on [0, horizon]
    int output_points = 100;
    int max_draws = 100000;
};

struct Trajectory {
    std::vector<double> initial;
    std::vector<double> times;
    /// states[k] is the full state at times[k]
    std::vector<std::vector<double>> states;
    std::map<SubsystemId, double> min_safe_margin;
    std::map<SubsystemId, double> min_barrier;
    bool violated = false;
    int steps = 0;
    int rejected = 0;
};

struct SimulationReport {
    std::vector<VarId> state_vars;
    std::vector<Trajectory> trajectories;
    int violations = 0;
};

/// Integrates the closed interconnection (children read their parents'
/// outputs, sources hold their values) from initial states drawn uniformly
/// from each initial set. Throws std::runtime_error when an initial set
/// cannot be sampled within max_draws.
SimulationReport simulate(const Interconnection& sys, const std::map<SubsystemId, Contract>& contracts,
                          const SimulationOptions& options);

/// Adaptive Dormand-Prince 5(4) step control over [t0, t1]; a step is
/// accepted when the scaled error estimate is at most `tol`.
using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;
struct OdeStats {
    int accepted = 0;
    int rejected = 0;
};
OdeStats integrate_rk45(const OdeRhs& f, double t0, double t1, std::vector<double>& y, double tol,
                        const std::function<void(double, const std::vector<double>&)>& on_step = {});

std::string write_report(const SimulationReport& report, const Interconnection& sys,
                         const SimulationOptions& options);
std::string write_plot_csv(const SimulationReport& report, const Interconnection& sys,
                           const std::map<SubsystemId, Contract>& contracts);

} // namespace agcv::app
