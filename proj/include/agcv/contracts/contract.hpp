// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "agcv/contracts/interconnection.hpp"
#include "agcv/contracts/normalization.hpp"
#include "agcv/sos/compile.hpp"

namespace agcv {

/// Solved unknowns and Gram matrices of one SOS program, in the program's
/// normalized coordinates.
struct ProgramEvidence {
    std::map<std::string, Polynomial> polynomials;
    std::vector<sos::GramEvidence> grams;

    static ProgramEvidence from(const sos::Extraction& ex);
    [[nodiscard]] const sos::GramEvidence* gram(const std::string& label) const;
};

/// Local contract of one subsystem. Constraint labels in `evidence`:
///   init[c]:  h - sum_c s_init[c] * b0_c
///   safe[c]:  -h + s_safe[c] * (q_c - safe_offset - zeta)
///   cbf:      grad h . F + a h - sum_{k,c} s_in[k][c] * (d_kc - delta)
///             - sum_c s_loc[c] * (q_c - safe_offset) - epsilon
/// where the s_loc terms are present only when `localized` is set.
struct Contract {
    SubsystemId subsystem = 0;
    double delta = 0.0;
    double zeta = 0.0;
    /// working safe region is {q >= safe_offset}
    double safe_offset = 0.0;
    double gain_a = 1.0;
    double epsilon = 1e-4;
    bool localized = true;
    /// barrier in original coordinates
    Polynomial barrier;
    Normalization normalization;
    ProgramEvidence evidence;

    /// {y : d - delta >= 0} for the given parent
    [[nodiscard]] PolynomialVector assumption(const Subsystem& s, SubsystemId parent) const;
    /// {x : q - safe_offset - zeta >= 0}
    [[nodiscard]] PolynomialVector guarantee_region(const Subsystem& s) const;
};

/// Evidence that a parent's guarantee implies a child's assumption. Labels
/// are edge[c]: d_c(o(x)) - delta - s_edge[c] * m, where the multiplicand m
/// is the parent's barrier (via = "barrier"), each safe-region component
/// (via = "region", multipliers s_edge[c][r]) or, for sources, the source
/// set components (via = "source").
struct EdgeEvidence {
    SubsystemId parent = 0;
    SubsystemId child = 0;
    double delta = 0.0;
    std::string via = "barrier";
    Normalization normalization;
    ProgramEvidence evidence;
};

struct TraceRecord {
    int step = 0;
    std::string node;
    std::string operation;
    std::vector<std::pair<std::string, double>> values;
    std::string status;
    std::string note;
};

struct Certificate {
    bool verdict = false;
    std::string algorithm;
    std::string graph_class;
    std::string model_hash;
    int iterations = 0;
    std::string reason;
    std::map<SubsystemId, Contract> contracts;
    std::vector<EdgeEvidence> edges;
    std::vector<TraceRecord> trace;
    /// flat key/value copy of the configuration used
    std::vector<std::pair<std::string, std::string>> config;
};

inline constexpr int kCertificateVersion = 1;

std::string write_certificate(const Certificate& cert, const VariableTable& vars);
/// Parses a certificate; polynomial text must only use variables of `vars`.
Certificate read_certificate(std::string_view text, const VariableTable& vars);
std::string write_trace(const std::vector<TraceRecord>& trace);

} // namespace agcv
