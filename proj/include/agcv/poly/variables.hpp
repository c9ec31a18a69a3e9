// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agcv {

using VarId = std::uint32_t;

/// Interns variable names to dense integer ids. One table per model; every
/// polynomial built from that model refers to ids issued here.
class VariableTable {
  public:
    VarId intern(std::string_view name);
    [[nodiscard]] std::optional<VarId> find(std::string_view name) const;
    [[nodiscard]] VarId at(std::string_view name) const;
    [[nodiscard]] const std::string& name(VarId id) const;
    [[nodiscard]] std::size_t size() const { return names_.size(); }

    static bool is_valid_name(std::string_view name);

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, VarId> ids_;
};

} // namespace agcv
