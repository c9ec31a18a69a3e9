// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace agcv::app {

/// Stable exit codes of the command-line tool.
enum ExitCode : int {
    kExitTrue = 0,
    kExitUsage = 1,
    kExitFalse = 2,
    kExitCheckFailed = 3,
};

struct GlobalOptions {
    std::optional<std::filesystem::path> config;
    std::uint64_t seed = 1;
    bool verbose = false;
};

/// `<model>` with its extension replaced by `ext` (".cert", ".trace", ...).
std::filesystem::path sibling(const std::filesystem::path& model, const std::string& ext);

int cmd_verify(const std::filesystem::path& model, const GlobalOptions& g, std::ostream& out, std::ostream& err);

int cmd_check(const std::filesystem::path& certificate, const std::filesystem::path& model, const GlobalOptions& g,
              std::ostream& out, std::ostream& err);

struct SimulateOptions {
    std::optional<int> samples;
    std::optional<double> horizon;
    /// certificate whose barriers are tracked; defaults to `<model>.cert` if present
    std::optional<std::filesystem::path> certificate;
    /// report goes to `<output>.sim`, plot data to `<output>.csv`; defaults to the model path
    std::optional<std::filesystem::path> output;
};
int cmd_simulate(const std::filesystem::path& model, const SimulateOptions& o, const GlobalOptions& g,
                 std::ostream& out, std::ostream& err);

/// Writes the model to `output` (atomically) or to `out` when empty.
int cmd_example(const std::string& name, int n, const std::optional<std::filesystem::path>& output,
                const GlobalOptions& g, std::ostream& out, std::ostream& err);

struct SweepOptions {
    std::string parameter;
    std::string range;
    /// defaults to the largest subsystem id
    std::optional<int> subsystem;
    bool relative = false;
    /// CSV destination; stdout when empty
    std::optional<std::filesystem::path> output;
};
int cmd_sweep(const std::filesystem::path& model, const SweepOptions& o, const GlobalOptions& g, std::ostream& out,
              std::ostream& err);

} // namespace agcv::app
