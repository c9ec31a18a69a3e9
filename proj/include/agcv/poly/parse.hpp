// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "agcv/poly/polynomial.hpp"
#include "agcv/poly/variables.hpp"

namespace agcv {

/// Raised on malformed polynomial text. `column` is 1-based within the input.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t column, const std::string& message)
        : std::runtime_error(message), column_(column) {}
    [[nodiscard]] std::size_t column() const { return column_; }

  private:
    std::size_t column_;
};

/// Parses text such as `3.5*x1^2*v2 - 0.8`. Supports + - * ^, parentheses and
/// division by nonzero constants. Unknown names are interned when
/// `allow_new_variables` is set, otherwise they are an error.
Polynomial parse_polynomial(std::string_view text, VariableTable& vars, bool allow_new_variables = true);
/// Read-only variant: every name must already exist in `vars`.
Polynomial parse_polynomial(std::string_view text, const VariableTable& vars);

/// Canonical text, highest-degree terms first, coefficients printed with 17
/// significant digits so parse(to_string(p)) == p.
std::string to_string(const Polynomial& p, const VariableTable& vars);
std::string format_double(double value);

} // namespace agcv
