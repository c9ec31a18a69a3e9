// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/poly/parse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace agcv {

namespace {

class Parser {
  public:
    Parser(std::string_view text, VariableTable* table, const VariableTable& lookup)
        : text_(text), table_(table), lookup_(lookup) {}

    Polynomial run() {
        skip_space();
        if (pos_ == text_.size()) {
            fail("empty polynomial");
        }
        Polynomial p = expression();
        skip_space();
        if (pos_ != text_.size()) {
            fail(std::string("unexpected character '") + text_[pos_] + "'");
        }
        return p;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_ + 1, msg); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Polynomial expression() {
        Polynomial acc = term();
        while (true) {
            if (accept('+')) {
                acc += term();
            } else if (accept('-')) {
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Polynomial term() {
        Polynomial acc = unary();
        while (true) {
            if (accept('*')) {
                acc = acc * unary();
            } else if (accept('/')) {
                const std::size_t at = pos_;
                Polynomial d = unary();
                if (d.degree() > 0) {
                    pos_ = at;
                    fail("division by a non-constant expression");
                }
                const double c = d.constant_term();
                if (c == 0.0) {
                    pos_ = at;
                    fail("division by zero");
                }
                acc *= 1.0 / c;
            } else {
                return acc;
            }
        }
    }

    Polynomial unary() {
        if (accept('-')) {
            return -unary();
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    Polynomial power() {
        Polynomial base = atom();
        if (accept('^')) {
            skip_space();
            const std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            if (start == pos_) {
                fail("exponent must be a non-negative integer");
            }
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
                fail("fractional exponents are not polynomial");
            }
            unsigned e = 0;
            const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, e);
            if (res.ec != std::errc{} || e > 64) {
                pos_ = start;
                fail("exponent out of range");
            }
            return pow(base, e);
        }
        return base;
    }

    Polynomial atom() {
        skip_space();
        if (pos_ == text_.size()) {
            fail("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Polynomial inner = expression();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return Polynomial(number());
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string_view name = text_.substr(start, pos_ - start);
            if (table_ != nullptr) {
                return Polynomial::variable(table_->intern(name));
            }
            const auto id = lookup_.find(name);
            if (!id) {
                pos_ = start;
                fail("unknown variable '" + std::string(name) + "'");
            }
            return Polynomial::variable(*id);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    double number() {
        const std::size_t start = pos_;
        double value = 0.0;
        const auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (res.ec != std::errc{}) {
            fail("malformed number");
        }
        pos_ = static_cast<std::size_t>(res.ptr - text_.data());
        if (!std::isfinite(value)) {
            pos_ = start;
            fail("number is not finite");
        }
        return value;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    VariableTable* table_;
    const VariableTable& lookup_;
};

} // namespace

Polynomial parse_polynomial(std::string_view text, VariableTable& vars, bool allow_new_variables) {
    Parser parser(text, allow_new_variables ? &vars : nullptr, vars);
    return parser.run();
}

Polynomial parse_polynomial(std::string_view text, const VariableTable& vars) {
    Parser parser(text, nullptr, vars);
    return parser.run();
}

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string to_string(const Polynomial& p, const VariableTable& vars) {
    if (p.is_zero()) {
        return "0";
    }
    std::string out;
    bool first = true;
    // highest degree first; canonical order inside each degree
    std::vector<std::pair<Monomial, double>> terms(p.terms().begin(), p.terms().end());
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return a.first.degree() > b.first.degree(); });
    for (const auto& [m, c] : terms) {
        double mag = c;
        if (first) {
            if (c < 0) {
                out += "-";
                mag = -c;
            }
        } else {
            out += c < 0 ? " - " : " + ";
            mag = std::abs(c);
        }
        first = false;
        std::string factors;
        for (const auto& [v, e] : m.powers()) {
            if (!factors.empty()) {
                factors += "*";
            }
            factors += vars.name(v);
            if (e > 1) {
                factors += "^" + std::to_string(e);
            }
        }
        if (factors.empty()) {
            out += format_double(mag);
        } else if (mag == 1.0) {
            out += factors;
        } else {
            out += format_double(mag) + "*" + factors;
        }
    }
    return out;
}

} // namespace agcv
