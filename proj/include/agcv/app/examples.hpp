// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

namespace agcv::app {

/// Vehicle chain behind a leader: source 0 is the leader's relative speed
/// (identically 0), vehicles 1..n follow. Requires n >= 1.
std::string platooning_model(int n);

/// Ring of n rooms, each coupled to both neighbours. Requires n >= 3.
std::string rooms_model(int n);

/// Dispatch by name ("platooning" or "rooms"); throws std::invalid_argument
/// for an unknown name or an out-of-range n.
std::string example_model(const std::string& name, int n);

} // namespace agcv::app
