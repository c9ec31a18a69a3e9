// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace agcv {

/// Error in a key-value document, with 1-based line and column.
class KvError : public std::runtime_error {
  public:
    KvError(int line, int column, const std::string& message);
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

  private:
    int line_;
    int column_;
};

struct KvScalar {
    std::string text;
    bool quoted = false;
    int line = 0;
    int column = 0;
};

struct KvValue {
    bool is_array = false;
    KvScalar scalar;
    std::vector<KvScalar> items;
};

struct KvEntry {
    std::string key;
    KvValue value;
    int line = 0;
    int column = 0;
};

struct KvBareLine {
    std::string text;
    int line = 0;
};

struct KvSection {
    std::string name;
    int line = 0;
    std::vector<KvEntry> entries;
    std::vector<KvBareLine> bare;

    [[nodiscard]] const KvEntry* find(std::string_view key) const;
    [[nodiscard]] const KvEntry& at(std::string_view key) const;

    // typed accessors; errors carry the entry position
    [[nodiscard]] std::string get_string(std::string_view key) const;
    [[nodiscard]] double get_double(std::string_view key) const;
    [[nodiscard]] long get_int(std::string_view key) const;
    [[nodiscard]] bool get_bool(std::string_view key) const;
    [[nodiscard]] std::vector<std::string> get_strings(std::string_view key) const;
    [[nodiscard]] std::vector<double> get_doubles(std::string_view key) const;

    void set(std::string key, std::string value);
    void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }
    void set(std::string key, double value);
    void set_int(std::string key, long value);
    void set_bool(std::string key, bool value);
    void set(std::string key, const std::vector<std::string>& values);
    void set(std::string key, const std::vector<double>& values);
    void add_bare(std::string text);

    /// Throws KvError on the first key not in `allowed`.
    void require_keys(const std::vector<std::string_view>& allowed) const;
};

/// TOML-like document: `[section]` headers, `key = value` entries, `#`
/// comments, quoted strings, bracketed (possibly multi-line) arrays and bare
/// lines such as `1 -> 2`. Entries before the first header belong to a
/// section with an empty name, which always exists and comes first.
class KvDocument {
  public:
    KvDocument();

    [[nodiscard]] const std::vector<KvSection>& sections() const { return sections_; }
    [[nodiscard]] KvSection& root() { return sections_.front(); }
    [[nodiscard]] const KvSection& root() const { return sections_.front(); }
    [[nodiscard]] const KvSection* find(std::string_view name) const;
    KvSection& add_section(std::string name);

    static KvDocument parse(std::string_view text);
    [[nodiscard]] std::string write() const;

  private:
    std::vector<KvSection> sections_;
};

/// Number formatting shared by every writer: 17 significant digits.
std::string kv_number(double v);
/// FNV-1a 64-bit hash, printed as 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);

} // namespace agcv
