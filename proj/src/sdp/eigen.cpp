// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sdp/eigen.hpp"

#include <limits>

#include "agcv/sdp/problem.hpp"

namespace agcv::sdp {

double min_eigenvalue(const Eigen::MatrixXd& m) {
    require_symmetric(m, "min_eigenvalue");
    if (m.rows() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

} // namespace agcv::sdp
