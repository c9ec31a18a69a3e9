// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/poly/variables.hpp"

#include <cctype>
#include <stdexcept>

namespace agcv {

bool VariableTable::is_valid_name(std::string_view name) {
    if (name.empty() || !std::isalpha(static_cast<unsigned char>(name.front()))) {
        return false;
    }
    for (const char c : name) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') {
            return false;
        }
    }
    return true;
}

VarId VariableTable::intern(std::string_view name) {
    if (const auto it = ids_.find(std::string(name)); it != ids_.end()) {
        return it->second;
    }
    if (!is_valid_name(name)) {
        throw std::invalid_argument("invalid variable name '" + std::string(name) + "'");
    }
    const auto id = static_cast<VarId>(names_.size());
    names_.emplace_back(name);
    ids_.emplace(names_.back(), id);
    return id;
}

std::optional<VarId> VariableTable::find(std::string_view name) const {
    if (const auto it = ids_.find(std::string(name)); it != ids_.end()) {
        return it->second;
    }
    return std::nullopt;
}

VarId VariableTable::at(std::string_view name) const {
    if (auto id = find(name)) {
        return *id;
    }
    throw std::out_of_range("unknown variable '" + std::string(name) + "'");
}

const std::string& VariableTable::name(VarId id) const {
    if (id >= names_.size()) {
        throw std::out_of_range("variable id " + std::to_string(id) + " not in table");
    }
    return names_[id];
}

} // namespace agcv
