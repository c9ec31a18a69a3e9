// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

namespace agcv::sdp {

/// Smallest eigenvalue of a symmetric matrix (Householder tridiagonalization
/// followed by implicit QL). Throws std::invalid_argument on asymmetric input.
/// An empty matrix has no eigenvalues and reports +infinity.
double min_eigenvalue(const Eigen::MatrixXd& m);

} // namespace agcv::sdp
