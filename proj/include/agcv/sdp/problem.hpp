// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace agcv::sdp {

/// One linear matrix inequality C0 + sum_i y_i C^i >= 0. Coefficient
/// matrices are stored densely, one per scalar variable; unused ones stay 0.
struct Block {
    Eigen::MatrixXd constant;
    std::vector<Eigen::MatrixXd> coefficients;

    [[nodiscard]] Eigen::Index size() const { return constant.rows(); }
};

/// Scalar equality row a^T y = b.
struct Equality {
    Eigen::VectorXd row;
    double rhs = 0.0;
};

/// minimize c^T y  subject to  C0_j + sum_i y_i C^i_j >= 0 for every block j
/// and A y = b.
class SdpProblem {
  public:
    explicit SdpProblem(std::size_t num_variables = 0);

    [[nodiscard]] std::size_t num_variables() const { return static_cast<std::size_t>(cost_.size()); }
    [[nodiscard]] const Eigen::VectorXd& cost() const { return cost_; }
    [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
    [[nodiscard]] const std::vector<Equality>& equalities() const { return equalities_; }
    [[nodiscard]] Eigen::Index total_dimension() const;

    void set_cost(std::size_t var, double value);
    /// Appends a block with the given constant part; returns its index.
    std::size_t add_block(const Eigen::MatrixXd& constant);
    std::size_t add_block(Eigen::Index size);
    void set_coefficient(std::size_t block, std::size_t var, const Eigen::MatrixXd& matrix);
    /// Adds value at (i, j) and (j, i) of the given coefficient (var) or of the
    /// constant part when var is npos.
    void add_entry(std::size_t block, std::size_t var, Eigen::Index i, Eigen::Index j, double value);
    void add_equality(const Eigen::VectorXd& row, double rhs);

    /// Realized block matrices for a given variable vector.
    [[nodiscard]] std::vector<Eigen::MatrixXd> evaluate(const Eigen::VectorXd& y) const;
    /// Max |A y - b| over equality rows, 0 when there are none.
    [[nodiscard]] double equality_residual(const Eigen::VectorXd& y) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  private:
    Eigen::VectorXd cost_;
    std::vector<Block> blocks_;
    std::vector<Equality> equalities_;
};

/// Throws std::invalid_argument when |M - M^T| exceeds 1e-12 (scaled by the
/// largest entry when that exceeds one).
void require_symmetric(const Eigen::MatrixXd& m, const std::string& what);

} // namespace agcv::sdp
