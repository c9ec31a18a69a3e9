// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sdp/problem.hpp"

#include <algorithm>
#include <stdexcept>

namespace agcv::sdp {

void require_symmetric(const Eigen::MatrixXd& m, const std::string& what) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(what + ": matrix is not square");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = m.size() == 0 ? 0.0 : (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        throw std::invalid_argument(what + ": matrix is not symmetric");
    }
}

SdpProblem::SdpProblem(std::size_t num_variables) : cost_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_variables))) {}

Eigen::Index SdpProblem::total_dimension() const {
    Eigen::Index n = 0;
    for (const auto& b : blocks_) {
        n += b.size();
    }
    return n;
}

void SdpProblem::set_cost(std::size_t var, double value) {
    if (var >= num_variables()) {
        throw std::out_of_range("set_cost: variable index out of range");
    }
    cost_(static_cast<Eigen::Index>(var)) = value;
}

std::size_t SdpProblem::add_block(const Eigen::MatrixXd& constant) {
    require_symmetric(constant, "block constant");
    Block b;
    b.constant = constant;
    b.coefficients.assign(num_variables(), Eigen::MatrixXd::Zero(constant.rows(), constant.cols()));
    blocks_.push_back(std::move(b));
    return blocks_.size() - 1;
}

std::size_t SdpProblem::add_block(Eigen::Index size) { return add_block(Eigen::MatrixXd::Zero(size, size)); }

void SdpProblem::set_coefficient(std::size_t block, std::size_t var, const Eigen::MatrixXd& matrix) {
    if (block >= blocks_.size() || var >= num_variables()) {
        throw std::out_of_range("set_coefficient: index out of range");
    }
    require_symmetric(matrix, "block coefficient");
    if (matrix.rows() != blocks_[block].size()) {
        throw std::invalid_argument("set_coefficient: size mismatch");
    }
    blocks_[block].coefficients[var] = matrix;
}

void SdpProblem::add_entry(std::size_t block, std::size_t var, Eigen::Index i, Eigen::Index j, double value) {
    if (block >= blocks_.size() || (var != npos && var >= num_variables())) {
        throw std::out_of_range("add_entry: index out of range");
    }
    Eigen::MatrixXd& m = var == npos ? blocks_[block].constant : blocks_[block].coefficients[var];
    if (i < 0 || j < 0 || i >= m.rows() || j >= m.rows()) {
        throw std::out_of_range("add_entry: entry out of range");
    }
    m(i, j) += value;
    if (i != j) {
        m(j, i) += value;
    }
}

void SdpProblem::add_equality(const Eigen::VectorXd& row, double rhs) {
    if (static_cast<std::size_t>(row.size()) != num_variables()) {
        throw std::invalid_argument("add_equality: row length mismatch");
    }
    equalities_.push_back({row, rhs});
}

std::vector<Eigen::MatrixXd> SdpProblem::evaluate(const Eigen::VectorXd& y) const {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) {
        Eigen::MatrixXd m = b.constant;
        for (std::size_t i = 0; i < b.coefficients.size(); ++i) {
            const double yi = y(static_cast<Eigen::Index>(i));
            if (yi != 0.0) {
                m += yi * b.coefficients[i];
            }
        }
        out.push_back(std::move(m));
    }
    return out;
}

double SdpProblem::equality_residual(const Eigen::VectorXd& y) const {
    double r = 0.0;
    for (const auto& e : equalities_) {
        r = std::max(r, std::abs(e.row.dot(y) - e.rhs));
    }
    return r;
}

} // namespace agcv::sdp
