// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "agcv/sdp/problem.hpp"

namespace agcv::sdp {

/// Writes the sparse SDPA format: m, nblocks, block sizes, c, then
/// `<matno> <blkno> <i> <j> <value>` upper-triangle entries (1-based), with
/// F0 = -C0 and Fi = C^i. Equalities go into one trailing diagonal block as
/// +/- row pairs. Values use 17 significant digits.
void write_sdpa(std::ostream& out, const SdpProblem& problem);
std::string to_sdpa(const SdpProblem& problem);

/// Parses sparse SDPA text. Lines starting with `"` or `*` are comments and
/// `,{}()` count as whitespace. Diagonal blocks whose entries come in exact
/// +/- pairs are read back as equalities; other diagonal entries become 1x1
/// blocks. Throws std::runtime_error on malformed input.
SdpProblem read_sdpa(std::istream& in);
SdpProblem from_sdpa(const std::string& text);

} // namespace agcv::sdp
