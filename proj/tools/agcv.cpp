// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
// Command-line front end. Exit codes: 0 True, 1 usage or model error,
// 2 False verdict, 3 certificate check failure.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "agcv/app/commands.hpp"

int main(int argc, char** argv) {
    using namespace agcv::app;
    CLI::App app{"Compositional safety verification with barrier-function contracts"};
    app.require_subcommand(1);
    app.fallthrough();
    GlobalOptions g;
    std::string config;
    app.add_option("--config", config, "Config file overriding the model's [config] keys")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Seed for randomized commands");
    app.add_flag("--verbose", g.verbose, "Extra output");

    std::string model;
    std::string cert;

    auto* verify = app.add_subcommand("verify", "Negotiate contracts; writes <model>.cert and <model>.trace");
    verify->add_option("model", model, "Model file")->required();

    auto* check = app.add_subcommand("check", "Independently re-validate a certificate against its model");
    check->add_option("certificate", cert, "Certificate file")->required();
    check->add_option("model", model, "Model file")->required();

    SimulateOptions sim;
    std::string sim_cert;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Integrate sampled closed-loop trajectories");
    simulate->add_option("model", model, "Model file")->required();
    simulate->add_option("--samples", sim.samples, "Number of trajectories");
    simulate->add_option("--horizon", sim.horizon, "Time horizon");
    simulate->add_option("--cert", sim_cert, "Certificate with barriers to track");
    simulate->add_option("--output", sim_out, "Output base path (.sim report, .csv plot data)");

    std::string name;
    int n = -1;
    std::string example_out;
    auto* example = app.add_subcommand("example", "Write a built-in example model");
    example->add_option("name", name, "platooning or rooms")->required()->check(CLI::IsMember({"platooning", "rooms"}));
    example->add_option("--n", n, "Vehicles (platooning, default 3) or rooms (default 4)");
    example->add_option("-o,--output", example_out, "Output file (stdout when omitted)");

    SweepOptions sw;
    int subsystem = -1;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Rerun synthesis on one subsystem over a parameter grid");
    sweep->add_option("model", model, "Model file")->required();
    sweep->add_option("parameter", sw.parameter, "delta, zeta, gain_a or degree")->required();
    sweep->add_option("range", sw.range, "v1,v2,... or lo:step:hi")->required();
    sweep->add_option("--subsystem", subsystem, "Subsystem id (default: largest)");
    sweep->add_flag("--relative", sw.relative, "Delta values are offsets from delta* at zeta = 0");
    sweep->add_option("-o,--output", sweep_out, "CSV file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitTrue : kExitUsage;
    }
    if (!config.empty()) {
        g.config = config;
    }
    try {
        if (verify->parsed()) {
            return cmd_verify(model, g, std::cout, std::cerr);
        }
        if (check->parsed()) {
            return cmd_check(cert, model, g, std::cout, std::cerr);
        }
        if (simulate->parsed()) {
            if (!sim_cert.empty()) {
                sim.certificate = sim_cert;
            }
            if (!sim_out.empty()) {
                sim.output = sim_out;
            }
            return cmd_simulate(model, sim, g, std::cout, std::cerr);
        }
        if (example->parsed()) {
            if (n < 0) {
                n = name == "rooms" ? 4 : 3;
            }
            std::optional<std::filesystem::path> out;
            if (!example_out.empty()) {
                out = example_out;
            }
            return cmd_example(name, n, out, g, std::cout, std::cerr);
        }
        if (sweep->parsed()) {
            if (subsystem >= 0) {
                sw.subsystem = subsystem;
            }
            if (!sweep_out.empty()) {
                sw.output = sweep_out;
            }
            return cmd_sweep(model, sw, g, std::cout, std::cerr);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
