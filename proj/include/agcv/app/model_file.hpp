// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "agcv/contracts/kv.hpp"
#include "agcv/negotiation/negotiation.hpp"

namespace agcv::app {

struct SimulationSettings {
    double sim_tol = 1e-8;
    double horizon = 50.0;
    int samples = 200;
};

/// A parsed model: the interconnection, its configuration and the hash of
/// the bytes it came from.
struct ModelFile {
    std::string name;
    std::string version;
    Interconnection system;
    NegotiationConfig config;
    SimulationSettings simulation;
    std::string hash;
};

/// Parses model text. Throws KvError (with line and column) on syntax errors,
/// unknown keys, bad polynomials or an invalid interconnection.
ModelFile parse_model(std::string_view text);
ModelFile load_model(const std::filesystem::path& path);

/// Applies [config] keys of `doc` to `cfg` (also used for --config files).
void apply_config(const KvSection& section, NegotiationConfig& cfg, SimulationSettings& sim);

std::string model_hash(std::string_view text);

/// Reads a whole file; throws std::runtime_error when unreadable.
std::string read_file(const std::filesystem::path& path);
/// Writes via a temporary file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace agcv::app
