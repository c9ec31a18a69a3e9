// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "agcv/contracts/compatibility.hpp"
#include "agcv/contracts/contract.hpp"
#include "agcv/synthesis/synthesis.hpp"

namespace agcv {

enum class Algorithm { Auto, Acyclic, Homogeneous, General };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);

struct NegotiationConfig {
    SynthesisConfig synthesis;
    Algorithm algorithm = Algorithm::Auto;
    int iteration_cap = 50;
    /// tighten only nodes with a failing outgoing edge in the general driver
    bool selective_update = false;
    /// synthesize the nodes of one layer concurrently
    bool parallel = true;
    /// re-run a failed node with degrees + 2 and record the outcome
    bool degree_retry = true;

    void validate() const;
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> snapshot() const;
};

/// Index sets of the bottom-up traversal: ready to update, still pending,
/// and done. They partition the subsystem ids.
struct NegotiationState {
    std::set<SubsystemId> ready;
    std::set<SubsystemId> pending;
    std::set<SubsystemId> done;
    std::map<SubsystemId, double> safe_offsets;
    std::map<SubsystemId, Contract> contracts;
    std::vector<TraceRecord> trace;

    /// leaves ready, everything else pending
    static NegotiationState initial(const Interconnection& sys);
};

/// Moves `finished` from ready to done, then promotes every pending node
/// whose children are all done.
NegotiationState update_index_sets(NegotiationState state, SubsystemId finished, const Interconnection& sys);

/// Progress callback: one line per negotiation step.
using StepLog = std::function<void(const TraceRecord&)>;

Certificate negotiate_acyclic(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log = {});
Certificate negotiate_homogeneous(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log = {});
Certificate negotiate_general(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log = {});

/// Dispatches on the classification (Auto) or validates an explicit choice;
/// throws std::invalid_argument on an invalid model or a mismatched choice.
Certificate run(const Interconnection& sys, const NegotiationConfig& cfg, const StepLog& log = {});

/// Premise of the homogeneous driver, {q >= a} inside the initial set for a > 0:
/// returns the smallest such a found, or a negative value when none is certified.
double homogeneous_premise_level(const Subsystem& s, const SynthesisConfig& cfg);

} // namespace agcv
