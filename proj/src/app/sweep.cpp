// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/app/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "agcv/contracts/kv.hpp"

namespace agcv::app {

std::string to_string(SweepParameter p) {
    switch (p) {
    case SweepParameter::Delta:
        return "delta";
    case SweepParameter::Zeta:
        return "zeta";
    case SweepParameter::GainA:
        return "gain_a";
    case SweepParameter::Degree:
        return "degree";
    }
    return "?";
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
    if (s == "delta") {
        return SweepParameter::Delta;
    }
    if (s == "zeta") {
        return SweepParameter::Zeta;
    }
    if (s == "gain_a") {
        return SweepParameter::GainA;
    }
    if (s == "degree") {
        return SweepParameter::Degree;
    }
    throw std::invalid_argument("unknown sweep parameter '" + s + "' (expected delta, zeta, gain_a or degree)");
}

namespace {

double to_double(const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != tok.size() || !std::isfinite(v)) {
        throw std::invalid_argument("bad number '" + tok + "' in range");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::vector<double> parse_range(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) {
            throw std::invalid_argument("range must be lo:step:hi");
        }
        const double lo = to_double(parts[0]);
        const double step = to_double(parts[1]);
        const double hi = to_double(parts[2]);
        if (step <= 0.0 || hi < lo) {
            throw std::invalid_argument("range needs step > 0 and hi >= lo");
        }
        const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
        if (n > 100000) {
            throw std::invalid_argument("range has too many points");
        }
        for (long k = 0; k <= n; ++k) {
            values.push_back(lo + static_cast<double>(k) * step);
        }
    } else {
        for (const auto& tok : split(text, ',')) {
            values.push_back(to_double(tok));
        }
    }
    if (values.empty()) {
        throw std::invalid_argument("empty range");
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

SweepResult sweep(const Subsystem& s, SweepParameter parameter, std::vector<double> values,
                  const SynthesisConfig& cfg, bool relative, double slack) {
    if (values.empty()) {
        throw std::invalid_argument("sweep needs a nonempty range");
    }
    SweepResult result;
    result.parameter = parameter;
    result.subsystem = s.id;
    std::sort(values.begin(), values.end());
    double base = 0.0;
    if (relative && parameter == SweepParameter::Delta) {
        const ScalarSearch d = maximal_internal_input_set(s, 0.0, cfg);
        if (!d.feasible) {
            throw std::runtime_error("subsystem " + std::to_string(s.id) + ": delta* at zeta = 0 is infeasible (" +
                                     d.reason + ")");
        }
        base = d.value;
    }
    auto delta_then_zeta = [&](const Subsystem& sub, double zeta, const SynthesisConfig& c, SweepRow& row) {
        const ScalarSearch d = maximal_internal_input_set(sub, zeta, c);
        if (!d.feasible) {
            return;
        }
        row.delta = d.value;
        row.feasible = true;
        const ScalarSearch z = minimal_safe_region(sub, d.value, c);
        if (z.feasible) {
            row.zeta = z.value;
        }
    };
    for (const double v : values) {
        SweepRow row;
        row.parameter = v;
        switch (parameter) {
        case SweepParameter::Zeta:
            delta_then_zeta(s, v, cfg, row);
            break;
        case SweepParameter::Delta: {
            row.parameter = base + v;
            row.delta = row.parameter;
            const ScalarSearch z = minimal_safe_region(s, row.parameter, cfg);
            row.feasible = z.feasible;
            if (z.feasible) {
                row.zeta = z.value;
            }
            break;
        }
        case SweepParameter::GainA: {
            Subsystem sub = s;
            sub.gain_a = v;
            delta_then_zeta(sub, 0.0, cfg, row);
            break;
        }
        case SweepParameter::Degree: {
            if (v < 1.0 || v != std::floor(v)) {
                throw std::invalid_argument("degree sweep values must be positive integers");
            }
            SynthesisConfig c = cfg;
            c.h_degree = static_cast<int>(v);
            delta_then_zeta(s, 0.0, c, row);
            break;
        }
        }
        result.rows.push_back(row);
    }
    // ordering checks over consecutive rows carrying the compared value
    std::optional<double> prev;
    for (const auto& row : result.rows) {
        std::optional<double> cur;
        double violation = 0.0;
        switch (parameter) {
        case SweepParameter::Zeta:
            result.ordering = "delta_star non-decreasing";
            cur = row.delta;
            if (cur && prev) {
                violation = *prev - *cur;
            }
            break;
        case SweepParameter::Delta:
            result.ordering = "zeta_star non-decreasing";
            cur = row.zeta;
            if (cur && prev) {
                violation = *prev - *cur;
            }
            break;
        case SweepParameter::Degree:
            result.ordering = "delta_star non-increasing";
            cur = row.delta;
            if (cur && prev) {
                violation = *cur - *prev;
            }
            break;
        case SweepParameter::GainA:
            result.ordering = "none";
            break;
        }
        result.max_violation = std::max(result.max_violation, violation);
        if (cur) {
            prev = cur;
        }
    }
    result.monotone = result.max_violation <= slack;
    return result;
}

std::string write_sweep_csv(const SweepResult& result) {
    std::ostringstream os;
    os << "parameter,delta_star,zeta_star,verdict\n";
    for (const auto& row : result.rows) {
        os << kv_number(row.parameter) << "," << (row.delta ? kv_number(*row.delta) : "") << ","
           << (row.zeta ? kv_number(*row.zeta) : "") << "," << (row.feasible ? "feasible" : "infeasible") << "\n";
    }
    os << "# monotone," << (result.monotone ? "true" : "false") << "," << result.ordering << ","
       << kv_number(result.max_violation) << "\n";
    return os.str();
}

} // namespace agcv::app
