// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sdp/sdpa.hpp"

#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace agcv::sdp {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_sdpa(std::ostream& out, const SdpProblem& problem) {
    const std::size_t m = problem.num_variables();
    const auto& blocks = problem.blocks();
    const auto& eqs = problem.equalities();
    const std::size_t nblocks = blocks.size() + (eqs.empty() ? 0 : 1);

    out << "\"agcv sparse SDPA export\n";
    out << m << "\n" << nblocks << "\n";
    for (std::size_t j = 0; j < blocks.size(); ++j) {
        out << (j ? " " : "") << blocks[j].size();
    }
    if (!eqs.empty()) {
        out << (blocks.empty() ? "" : " ") << -static_cast<long>(2 * eqs.size());
    }
    out << "\n";
    for (std::size_t i = 0; i < m; ++i) {
        out << (i ? " " : "") << fmt(problem.cost()(static_cast<Eigen::Index>(i)));
    }
    out << "\n";

    for (std::size_t mat = 0; mat <= m; ++mat) {
        for (std::size_t j = 0; j < blocks.size(); ++j) {
            const Eigen::MatrixXd& src = mat == 0 ? blocks[j].constant : blocks[j].coefficients[mat - 1];
            const double sign = mat == 0 ? -1.0 : 1.0;
            for (Eigen::Index r = 0; r < src.rows(); ++r) {
                for (Eigen::Index c = r; c < src.cols(); ++c) {
                    if (src(r, c) != 0.0) {
                        out << mat << " " << j + 1 << " " << r + 1 << " " << c + 1 << " " << fmt(sign * src(r, c))
                            << "\n";
                    }
                }
            }
        }
        if (!eqs.empty()) {
            // a^T y - b >= 0 and -(a^T y - b) >= 0; F0 holds +b and -b.
            for (std::size_t e = 0; e < eqs.size(); ++e) {
                const double v = mat == 0 ? eqs[e].rhs : eqs[e].row(static_cast<Eigen::Index>(mat - 1));
                if (v == 0.0) {
                    continue;
                }
                const auto pos = static_cast<long>(2 * e + 1);
                out << mat << " " << nblocks << " " << pos << " " << pos << " " << fmt(v) << "\n";
                out << mat << " " << nblocks << " " << pos + 1 << " " << pos + 1 << " " << fmt(-v) << "\n";
            }
        }
    }
}

std::string to_sdpa(const SdpProblem& problem) {
    std::ostringstream os;
    write_sdpa(os, problem);
    return os.str();
}

SdpProblem read_sdpa(std::istream& in) {
    std::string cleaned;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && (line[0] == '"' || line[0] == '*')) {
            continue;
        }
        for (char& ch : line) {
            if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') {
                ch = ' ';
            }
        }
        cleaned += line;
        cleaned += '\n';
    }
    std::istringstream ts(cleaned);
    long m = 0;
    long nblocks = 0;
    if (!(ts >> m >> nblocks) || m < 0 || nblocks < 0) {
        throw std::runtime_error("SDPA: bad header");
    }
    std::vector<long> sizes(static_cast<std::size_t>(nblocks));
    for (auto& s : sizes) {
        if (!(ts >> s) || s == 0) {
            throw std::runtime_error("SDPA: bad block size");
        }
    }
    Eigen::VectorXd c(m);
    for (long i = 0; i < m; ++i) {
        if (!(ts >> c(i))) {
            throw std::runtime_error("SDPA: bad cost vector");
        }
    }
    // dense storage of every F matrix, per block
    std::vector<std::vector<Eigen::MatrixXd>> f(static_cast<std::size_t>(nblocks));
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        const long n = std::labs(sizes[j]);
        f[j].assign(static_cast<std::size_t>(m + 1), Eigen::MatrixXd::Zero(n, n));
    }
    long mat = 0;
    long blk = 0;
    long r = 0;
    long col = 0;
    double v = 0.0;
    while (ts >> mat) {
        if (!(ts >> blk >> r >> col >> v)) {
            throw std::runtime_error("SDPA: truncated entry");
        }
        if (mat < 0 || mat > m || blk < 1 || blk > nblocks) {
            throw std::runtime_error("SDPA: entry index out of range");
        }
        auto& target = f[static_cast<std::size_t>(blk - 1)][static_cast<std::size_t>(mat)];
        if (r < 1 || col < 1 || r > target.rows() || col > target.rows()) {
            throw std::runtime_error("SDPA: entry position out of range");
        }
        if (sizes[static_cast<std::size_t>(blk - 1)] < 0 && r != col) {
            throw std::runtime_error("SDPA: off-diagonal entry in a diagonal block");
        }
        target(r - 1, col - 1) = v;
        target(col - 1, r - 1) = v;
    }
    if (!ts.eof()) {
        throw std::runtime_error("SDPA: malformed entry");
    }

    SdpProblem problem(static_cast<std::size_t>(m));
    for (long i = 0; i < m; ++i) {
        problem.set_cost(static_cast<std::size_t>(i), c(i));
    }
    auto add_psd = [&](const std::vector<Eigen::MatrixXd>& mats) {
        const std::size_t b = problem.add_block(Eigen::MatrixXd(-mats[0]));
        for (long i = 0; i < m; ++i) {
            problem.set_coefficient(b, static_cast<std::size_t>(i), mats[static_cast<std::size_t>(i + 1)]);
        }
    };
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        if (sizes[j] > 0) {
            add_psd(f[j]);
            continue;
        }
        const long n = -sizes[j];
        long k = 0;
        while (k < n) {
            bool paired = k + 1 < n;
            for (long i = 0; paired && i <= m; ++i) {
                const auto& fm = f[j][static_cast<std::size_t>(i)];
                paired = fm(k, k) == -fm(k + 1, k + 1);
            }
            if (paired) {
                Eigen::VectorXd row(m);
                for (long i = 0; i < m; ++i) {
                    row(i) = f[j][static_cast<std::size_t>(i + 1)](k, k);
                }
                problem.add_equality(row, f[j][0](k, k));
                k += 2;
            } else {
                std::vector<Eigen::MatrixXd> one;
                for (long i = 0; i <= m; ++i) {
                    one.push_back(Eigen::MatrixXd::Constant(1, 1, f[j][static_cast<std::size_t>(i)](k, k)));
                }
                add_psd(one);
                k += 1;
            }
        }
    }
    return problem;
}

SdpProblem from_sdpa(const std::string& text) {
    std::istringstream is(text);
    return read_sdpa(is);
}

} // namespace agcv::sdp
