// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agcv/contracts/contract.hpp"

namespace agcv {

struct CheckSettings {
    double residual_tol = 1e-6;
    double psd_tol = 1e-7;
    /// sampled implications must hold with margin >= -sample_margin
    double sample_margin = 1e-6;
    int samples = 1000;
    int max_draws = 100000;
    std::uint64_t seed = 1;
};

struct CheckReport {
    int checks = 0;
    std::vector<std::string> failures;
    [[nodiscard]] bool passed() const { return failures.empty(); }
};

/// Re-derives every constraint polynomial of the certificate from the model
/// alone and compares it with the stored Gram matrices; checks PSD-ness,
/// the structural hypotheses of a True verdict and sampled implications.
CheckReport check_certificate(const Certificate& cert, const Interconnection& sys, const CheckSettings& settings = {});

/// Individual pieces, exposed for tests.
void check_contract(const Contract& c, const Subsystem& s, const CheckSettings& settings, CheckReport& report);
void check_edge(const EdgeEvidence& e, const Interconnection& sys, const Certificate& cert,
                const CheckSettings& settings, CheckReport& report);

} // namespace agcv
