// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/app/examples.hpp"

#include <sstream>
#include <stdexcept>
#include <vector>

namespace agcv::app {

namespace {

std::string quoted_list(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        out += (i ? ", \"" : "\"") + items[i] + "\"";
    }
    return out + "]";
}

// -x^T Q x + q^T x - level with Q = [[100, 30], [30, 50]], q = (600, 180)
std::string platoon_set(const std::string& d, const std::string& v, int level) {
    return "-100*" + d + "^2 - 60*" + d + "*" + v + " - 50*" + v + "^2 + 600*" + d + " + 180*" + v + " - " +
           std::to_string(level);
}

} // namespace

std::string platooning_model(int n) {
    if (n < 1) {
        throw std::invalid_argument("platooning needs at least one follower (n >= 1)");
    }
    std::ostringstream os;
    os << "# Vehicle platoon: state (d_i, v_i) is the gap to the preceding vehicle and the\n"
          "# speed relative to the leader. Source 0 is the leader, whose relative speed is 0.\n\n";
    os << "[meta]\nname = \"platooning\"\nversion = 1\n\n";
    std::vector<std::string> names{"v0"};
    for (int i = 1; i <= n; ++i) {
        names.push_back("d" + std::to_string(i));
        names.push_back("v" + std::to_string(i));
    }
    os << "[variables]\nnames = " << quoted_list(names) << "\n\n";
    os << "[source.0]\noutputs = [\"v0\"]\nset = [\"-v0^2\"]\nvalue = [0]\n\n";
    for (int i = 1; i <= n; ++i) {
        const std::string d = "d" + std::to_string(i);
        const std::string v = "v" + std::to_string(i);
        const std::string w = "v" + std::to_string(i - 1);
        const std::string rel = "(" + v + " - " + w + ")";
        const std::string gap = "(" + d + " - 3)";
        os << "[subsystem." << i << "]\n";
        os << "state = [\"" << d << "\", \"" << v << "\"]\n";
        if (i < n) {
            os << "outputs = [\"" << v << "\"]\noutput_map = [\"" << v << "\"]\n";
        }
        // closed loop with u = -(v - w) - (d - 3) - (d - 3)^3
        os << "dynamics = " << quoted_list({v + " - " + w, "-" + rel + "^3 - " + rel + " - " + gap + " - " + gap + "^3"})
           << "\n";
        os << "initial_set = " << quoted_list({platoon_set(d, v, 899)}) << "\n";
        os << "safe_region = " << quoted_list({platoon_set(d, v, 800)}) << "\n";
        os << "inputs." << i - 1 << " = [\"" << w << "\"]\n";
        os << "bounds." << i - 1 << " = [\"2.439 - " << w << "^2\"]\n\n";
    }
    os << "[edges]\n";
    for (int i = 1; i <= n; ++i) {
        os << i - 1 << " -> " << i << "\n";
    }
    os << "\n[config]\nalgorithm = \"auto\"\ngain_a = 1.4\nepsilon = 0.0001\nbisection_tol = 0.001\n";
    return os.str();
}

std::string rooms_model(int n) {
    if (n < 3) {
        throw std::invalid_argument("a ring of rooms needs n >= 3 so that both neighbours are distinct");
    }
    std::ostringstream os;
    os << "# Ring of rooms heated by a shared controller law.\n"
          "# (t_e, t_h, alpha, beta, gamma) = (-1, 50, 0.05, 0.008, 0.004)\n\n";
    os << "[meta]\nname = \"rooms\"\nversion = 1\n\n";
    std::vector<std::string> names;
    for (int i = 1; i <= n; ++i) {
        names.push_back("x" + std::to_string(i));
    }
    os << "[variables]\nnames = " << quoted_list(names) << "\n\n";
    for (int i = 1; i <= n; ++i) {
        const int prev = i == 1 ? n : i - 1;
        const int next = i == n ? 1 : i + 1;
        const std::string x = "x" + std::to_string(i);
        const std::string xm = "x" + std::to_string(prev);
        const std::string xp = "x" + std::to_string(next);
        const std::string coupling = "(" + xp + " + " + xm + " - 2*" + x + ")";
        const std::string u = "(0.05*" + coupling + " + 0.05*(25 - " + x + "))";
        os << "[subsystem." << i << "]\n";
        os << "state = [\"" << x << "\"]\noutputs = [\"" << x << "\"]\noutput_map = [\"" << x << "\"]\n";
        os << "dynamics = [\"0.05*" << coupling << " + 0.008*(-1 - " << x << ") + 0.004*(50 - " << x << ")*" << u
           << "\"]\n";
        os << "initial_set = [\"1 - (" << x << " - 25)^2\"]\n";
        os << "safe_region = [\"25 - (" << x << " - 25)^2\"]\n";
        os << "inputs." << prev << " = [\"" << xm << "\"]\n";
        os << "bounds." << prev << " = [\"25 - (" << xm << " - 25)^2\"]\n";
        os << "inputs." << next << " = [\"" << xp << "\"]\n";
        os << "bounds." << next << " = [\"25 - (" << xp << " - 25)^2\"]\n\n";
    }
    os << "[edges]\n";
    for (int i = 1; i <= n; ++i) {
        const int prev = i == 1 ? n : i - 1;
        const int next = i == n ? 1 : i + 1;
        os << prev << " -> " << i << "\n" << next << " -> " << i << "\n";
    }
    os << "\n[config]\nalgorithm = \"auto\"\ngain_a = 0.025\nepsilon = 0.0001\nbisection_tol = 0.001\n";
    return os.str();
}

std::string example_model(const std::string& name, int n) {
    if (name == "platooning") {
        return platooning_model(n);
    }
    if (name == "rooms") {
        return rooms_model(n);
    }
    throw std::invalid_argument("unknown example '" + name + "' (expected platooning or rooms)");
}

} // namespace agcv::app
