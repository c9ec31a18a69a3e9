// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/contracts/kv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>

namespace agcv {

KvError::KvError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_(line), column_(column) {}

std::string kv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

double to_double(const KvScalar& s) {
    double v = 0.0;
    const char* b = s.text.data();
    const char* e = b + s.text.size();
    const auto res = std::from_chars(b, e, v);
    if (s.text.empty() || res.ec != std::errc{} || res.ptr != e) {
        throw KvError(s.line, s.column, "expected a number, found '" + s.text + "'");
    }
    return v;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
            out += c;
        } else if (c == '\n') {
            out += "\\n";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::string render(const KvScalar& s) { return s.quoted ? quote(s.text) : s.text; }

bool is_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-'; }

class Reader {
  public:
    explicit Reader(std::string_view text) : text_(text) {}

    KvDocument run() {
        KvDocument doc;
        KvSection* current = &doc.root();
        while (!at_end()) {
            skip_blank();
            if (at_end()) {
                break;
            }
            const char c = peek();
            if (c == '\n') {
                advance();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '[') {
                current = &header(doc);
                continue;
            }
            line_entry(*current);
        }
        return doc;
    }

  private:
    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return text_[pos_]; }
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw KvError(line_, col_, msg); }

    void skip_blank() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) {
            advance();
        }
    }
    void skip_comment() {
        while (!at_end() && peek() != '\n') {
            advance();
        }
    }
    void end_of_line() {
        skip_blank();
        if (!at_end() && peek() == '#') {
            skip_comment();
        }
        if (!at_end()) {
            if (peek() != '\n') {
                fail(std::string("unexpected '") + peek() + "' after value");
            }
            advance();
        }
    }

    KvSection& header(KvDocument& doc) {
        const int line = line_;
        advance();
        skip_blank();
        std::string name;
        while (!at_end() && is_key_char(peek())) {
            name += peek();
            advance();
        }
        skip_blank();
        if (name.empty() || at_end() || peek() != ']') {
            fail("malformed section header");
        }
        advance();
        end_of_line();
        if (doc.find(name) != nullptr) {
            throw KvError(line, 1, "duplicate section [" + name + "]");
        }
        KvSection& s = doc.add_section(name);
        s.line = line;
        return s;
    }

    void line_entry(KvSection& section) {
        // a line is an entry when it has `key =`, otherwise it is a bare line
        std::size_t p = pos_;
        while (p < text_.size() && is_key_char(text_[p])) {
            ++p;
        }
        std::size_t q = p;
        while (q < text_.size() && (text_[q] == ' ' || text_[q] == '\t')) {
            ++q;
        }
        if (p == pos_ || q >= text_.size() || text_[q] != '=') {
            const int line = line_;
            std::string raw;
            while (!at_end() && peek() != '\n' && peek() != '#') {
                raw += peek();
                advance();
            }
            while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back()))) {
                raw.pop_back();
            }
            end_of_line();
            section.bare.push_back({raw, line});
            return;
        }
        KvEntry entry;
        entry.line = line_;
        entry.column = col_;
        entry.key = std::string(text_.substr(pos_, p - pos_));
        if (!std::isalpha(static_cast<unsigned char>(entry.key[0])) && entry.key[0] != '_') {
            fail("keys must start with a letter");
        }
        if (section.find(entry.key) != nullptr) {
            fail("duplicate key '" + entry.key + "'");
        }
        while (pos_ < q + 1) {
            advance();
        }
        skip_blank();
        if (at_end() || peek() == '\n' || peek() == '#') {
            fail("missing value for '" + entry.key + "'");
        }
        if (peek() == '[') {
            entry.value.is_array = true;
            advance();
            array_items(entry.value.items);
        } else {
            entry.value.scalar = scalar(false);
        }
        end_of_line();
        section.entries.push_back(std::move(entry));
    }

    void array_items(std::vector<KvScalar>& items) {
        while (true) {
            // whitespace, newlines and comments are allowed between items
            while (!at_end()) {
                skip_blank();
                if (!at_end() && peek() == '#') {
                    skip_comment();
                }
                if (!at_end() && peek() == '\n') {
                    advance();
                    continue;
                }
                break;
            }
            if (at_end()) {
                fail("unterminated array");
            }
            if (peek() == ']') {
                advance();
                return;
            }
            items.push_back(scalar(true));
            skip_blank();
            if (!at_end() && peek() == ',') {
                advance();
            } else if (!at_end() && (peek() == ']' || peek() == '\n' || peek() == '#')) {
                continue;
            } else {
                fail("expected ',' or ']' in array");
            }
        }
    }

    KvScalar scalar(bool in_array) {
        KvScalar s;
        s.line = line_;
        s.column = col_;
        if (peek() == '"') {
            s.quoted = true;
            advance();
            while (true) {
                if (at_end() || peek() == '\n') {
                    fail("unterminated string");
                }
                char c = peek();
                advance();
                if (c == '"') {
                    break;
                }
                if (c == '\\') {
                    if (at_end()) {
                        fail("unterminated string");
                    }
                    const char e = peek();
                    advance();
                    c = e == 'n' ? '\n' : e;
                }
                s.text += c;
            }
            return s;
        }
        while (!at_end()) {
            const char c = peek();
            if (c == '\n' || c == '#' || (in_array && (c == ',' || c == ']'))) {
                break;
            }
            s.text += c;
            advance();
        }
        while (!s.text.empty() && std::isspace(static_cast<unsigned char>(s.text.back()))) {
            s.text.pop_back();
        }
        if (s.text.empty()) {
            fail("empty value");
        }
        return s;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

const KvEntry* KvSection::find(std::string_view key) const {
    for (const auto& e : entries) {
        if (e.key == key) {
            return &e;
        }
    }
    return nullptr;
}

const KvEntry& KvSection::at(std::string_view key) const {
    const KvEntry* e = find(key);
    if (e == nullptr) {
        throw KvError(line, 1, "section [" + name + "] is missing key '" + std::string(key) + "'");
    }
    return *e;
}

std::string KvSection::get_string(std::string_view key) const {
    const KvEntry& e = at(key);
    if (e.value.is_array) {
        throw KvError(e.line, e.column, "'" + e.key + "' must be a single value");
    }
    return e.value.scalar.text;
}

double KvSection::get_double(std::string_view key) const {
    const KvEntry& e = at(key);
    if (e.value.is_array) {
        throw KvError(e.line, e.column, "'" + e.key + "' must be a number");
    }
    return to_double(e.value.scalar);
}

long KvSection::get_int(std::string_view key) const {
    const KvEntry& e = at(key);
    const std::string& t = e.value.scalar.text;
    long v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (e.value.is_array || t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw KvError(e.line, e.column, "'" + e.key + "' must be an integer");
    }
    return v;
}

bool KvSection::get_bool(std::string_view key) const {
    const KvEntry& e = at(key);
    const std::string& t = e.value.scalar.text;
    if (!e.value.is_array && t == "true") {
        return true;
    }
    if (!e.value.is_array && t == "false") {
        return false;
    }
    throw KvError(e.line, e.column, "'" + e.key + "' must be true or false");
}

std::vector<std::string> KvSection::get_strings(std::string_view key) const {
    const KvEntry& e = at(key);
    std::vector<std::string> out;
    if (!e.value.is_array) {
        out.push_back(e.value.scalar.text);
        return out;
    }
    for (const auto& s : e.value.items) {
        out.push_back(s.text);
    }
    return out;
}

std::vector<double> KvSection::get_doubles(std::string_view key) const {
    const KvEntry& e = at(key);
    std::vector<double> out;
    if (!e.value.is_array) {
        out.push_back(to_double(e.value.scalar));
        return out;
    }
    for (const auto& s : e.value.items) {
        out.push_back(to_double(s));
    }
    return out;
}

void KvSection::set(std::string key, std::string value) {
    KvEntry e;
    e.key = std::move(key);
    e.value.scalar.text = std::move(value);
    e.value.scalar.quoted = true;
    entries.push_back(std::move(e));
}

void KvSection::set(std::string key, double value) {
    KvEntry e;
    e.key = std::move(key);
    e.value.scalar.text = kv_number(value);
    entries.push_back(std::move(e));
}

void KvSection::set_int(std::string key, long value) {
    KvEntry e;
    e.key = std::move(key);
    e.value.scalar.text = std::to_string(value);
    entries.push_back(std::move(e));
}

void KvSection::set_bool(std::string key, bool value) {
    KvEntry e;
    e.key = std::move(key);
    e.value.scalar.text = value ? "true" : "false";
    entries.push_back(std::move(e));
}

void KvSection::set(std::string key, const std::vector<std::string>& values) {
    KvEntry e;
    e.key = std::move(key);
    e.value.is_array = true;
    for (const auto& v : values) {
        e.value.items.push_back({v, true, 0, 0});
    }
    entries.push_back(std::move(e));
}

void KvSection::set(std::string key, const std::vector<double>& values) {
    KvEntry e;
    e.key = std::move(key);
    e.value.is_array = true;
    for (const double v : values) {
        e.value.items.push_back({kv_number(v), false, 0, 0});
    }
    entries.push_back(std::move(e));
}

void KvSection::add_bare(std::string text) { bare.push_back({std::move(text), 0}); }

void KvSection::require_keys(const std::vector<std::string_view>& allowed) const {
    for (const auto& e : entries) {
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
            throw KvError(e.line, e.column, "unknown key '" + e.key + "' in [" + name + "]");
        }
    }
}

KvDocument::KvDocument() { sections_.emplace_back(); }

const KvSection* KvDocument::find(std::string_view name) const {
    for (const auto& s : sections_) {
        if (s.name == name) {
            return &s;
        }
    }
    return nullptr;
}

KvSection& KvDocument::add_section(std::string name) {
    KvSection s;
    s.name = std::move(name);
    sections_.push_back(std::move(s));
    return sections_.back();
}

KvDocument KvDocument::parse(std::string_view text) { return Reader(text).run(); }

std::string KvDocument::write() const {
    std::string out;
    for (std::size_t i = 0; i < sections_.size(); ++i) {
        const KvSection& s = sections_[i];
        if (i > 0) {
            if (!out.empty()) {
                out += "\n";
            }
            out += "[" + s.name + "]\n";
        }
        for (const auto& e : s.entries) {
            out += e.key + " = ";
            if (e.value.is_array) {
                out += "[";
                for (std::size_t k = 0; k < e.value.items.size(); ++k) {
                    out += (k ? ", " : "") + render(e.value.items[k]);
                }
                out += "]";
            } else {
                out += render(e.value.scalar);
            }
            out += "\n";
        }
        for (const auto& b : s.bare) {
            out += b.text + "\n";
        }
    }
    return out;
}

} // namespace agcv
