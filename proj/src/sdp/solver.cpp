// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/sdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "agcv/sdp/eigen.hpp"

namespace agcv::sdp {

std::string_view to_string(Status s) {
    switch (s) {
    case Status::Optimal:
        return "Optimal";
    case Status::Feasible:
        return "Feasible";
    case Status::Infeasible:
        return "Infeasible";
    case Status::Unbounded:
        return "Unbounded";
    case Status::NumericalFailure:
        return "NumericalFailure";
    }
    return "NumericalFailure";
}

SolverSettings SolverSettings::from_environment() {
    SolverSettings s;
    if (const char* env = std::getenv("AGCV_MAX_SDP_DIM"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != nullptr && *end == '\0' && v > 0) {
            s.max_dimension = v;
        }
    }
    return s;
}

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Blocks = std::vector<Mat>;

double inner(const Blocks& a, const Blocks& b) {
    double sum = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        sum += a[j].cwiseProduct(b[j]).sum();
    }
    return sum;
}

double norm(const Blocks& a) { return std::sqrt(inner(a, a)); }

void axpy(Blocks& y, double alpha, const Blocks& x) {
    for (std::size_t j = 0; j < y.size(); ++j) {
        y[j] += alpha * x[j];
    }
}

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Inequality form after equality elimination: s = h - G x >= 0 with
// G x = -sum_k x_k C_k. Column k of a[j] holds vec(C_k) for block j.
struct Reduced {
    Vec c;
    Blocks h;
    std::vector<Mat> a;
    Vec y0;
    Mat null_basis;
    bool identity_basis = true;
};

Vec lift(const Reduced& r, const Vec& x) {
    if (r.identity_basis) {
        return x;
    }
    return r.y0 + r.null_basis * x;
}

class Hsd {
  public:
    Hsd(const Reduced& data, const SolverSettings& settings) : d_(data), set_(settings) {
        n_ = d_.c.size();
        for (const auto& h : d_.h) {
            nu_ += static_cast<double>(h.rows());
        }
        resx0_ = std::max(1.0, d_.c.norm());
        resz0_ = std::max(1.0, norm(d_.h));
    }

    struct Result {
        Status status = Status::NumericalFailure;
        Vec x;
        double gap = 0.0;
        int iterations = 0;
    };

    Result run() {
        Result res;
        if (!initialize()) {
            res.x = Vec::Zero(n_);
            return res;
        }
        const Vec& c = d_.c;
        for (int iter = 0; iter <= set_.max_iterations; ++iter) {
            res.iterations = iter;
            const Blocks gx = apply_g(x_);
            const Vec gtz = apply_gt(z_);
            const double hz = inner(d_.h, z_);
            const double cx = c.dot(x_);

            Vec rx = gtz + c * tau_;
            Blocks rz = gx;
            axpy(rz, 1.0, s_);
            axpy(rz, -tau_, d_.h);
            const double rt = cx + hz + kappa_;

            const double gap = inner(s_, z_);
            const double mu = (gap + tau_ * kappa_) / (nu_ + 1.0);
            const double pcost = cx / tau_;
            const double pres = norm(rz) / tau_ / resz0_;
            const double dres = rx.norm() / tau_ / resx0_;
            const double scaled_gap = gap / (tau_ * tau_) / std::max(1.0, std::abs(pcost));

            if (set_.verbose) {
                std::fprintf(stderr, "%3d pcost %+.6e pres %.2e dres %.2e gap %.2e tau %.2e kappa %.2e\n", iter, pcost,
                             pres, dres, scaled_gap, tau_, kappa_);
            }
            if (pres <= set_.feas_tol && dres <= set_.feas_tol && scaled_gap <= set_.gap_tol) {
                res.status = Status::Optimal;
                res.x = x_ / tau_;
                res.gap = scaled_gap;
                return res;
            }
            if (hz < 0.0) {
                const double pinf = gtz.norm() / resx0_ / (-hz);
                if (pinf <= set_.feas_tol) {
                    res.status = Status::Infeasible;
                    res.x = x_ / tau_;
                    res.gap = scaled_gap;
                    return res;
                }
            }
            if (cx < 0.0) {
                Blocks gs = gx;
                axpy(gs, 1.0, s_);
                const double dinf = norm(gs) / resz0_ / (-cx);
                if (dinf <= set_.feas_tol) {
                    res.status = Status::Unbounded;
                    res.x = x_ / tau_;
                    res.gap = scaled_gap;
                    return res;
                }
            }
            if (iter == set_.max_iterations) {
                break;
            }
            if (!step(rx, rz, rt, mu)) {
                break;
            }
            res.gap = scaled_gap;
        }
        res.status = Status::NumericalFailure;
        res.x = x_ / tau_;
        return res;
    }

  private:
    Blocks apply_g(const Vec& x) const {
        Blocks out(d_.h.size());
        for (std::size_t j = 0; j < d_.h.size(); ++j) {
            const Eigen::Index nj = d_.h[j].rows();
            Vec v = -(d_.a[j] * x);
            out[j] = Eigen::Map<Mat>(v.data(), nj, nj);
        }
        return out;
    }

    Vec apply_gt(const Blocks& z) const {
        Vec out = Vec::Zero(n_);
        for (std::size_t j = 0; j < z.size(); ++j) {
            out -= d_.a[j].transpose() * Eigen::Map<const Vec>(z[j].data(), z[j].size());
        }
        return out;
    }

    bool factor(const Mat& h, Eigen::LLT<Mat>& llt) const {
        const double diag = h.size() == 0 ? 1.0 : std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        double reg = 0.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Mat hr = h;
            hr.diagonal().array() += reg;
            llt.compute(hr);
            if (llt.info() == Eigen::Success) {
                return true;
            }
            reg = reg == 0.0 ? 1e-14 * diag : reg * 100.0;
        }
        return false;
    }

    // Shifts a block-diagonal matrix into the interior when needed.
    static void shift_into_cone(Blocks& m) {
        double min_eig = std::numeric_limits<double>::infinity();
        for (const auto& b : m) {
            min_eig = std::min(min_eig, min_eigenvalue(b));
        }
        const double nrm = norm(m);
        if (min_eig <= 1e-8 * std::max(nrm, 1.0)) {
            const double shift = 1.0 - min_eig;
            for (auto& b : m) {
                b.diagonal().array() += shift;
            }
        }
    }

    bool initialize() {
        Mat h0 = Mat::Zero(n_, n_);
        for (const auto& a : d_.a) {
            h0.noalias() += a.transpose() * a;
        }
        Eigen::LLT<Mat> llt;
        if (!factor(h0, llt)) {
            return false;
        }
        x_ = llt.solve(apply_gt(d_.h));
        s_ = d_.h;
        axpy(s_, -1.0, apply_g(x_));
        z_ = apply_g(llt.solve(-d_.c));
        shift_into_cone(s_);
        shift_into_cone(z_);
        tau_ = 1.0;
        kappa_ = 1.0;
        return true;
    }

    struct Scaling {
        std::vector<Mat> r;
        std::vector<Mat> rti;
        std::vector<Vec> lambda;
    };

    bool compute_scaling(Scaling& w) const {
        const std::size_t nb = s_.size();
        w.r.resize(nb);
        w.rti.resize(nb);
        w.lambda.resize(nb);
        for (std::size_t j = 0; j < nb; ++j) {
            Eigen::LLT<Mat> ls(s_[j]);
            Eigen::LLT<Mat> lz(z_[j]);
            if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) {
                return false;
            }
            const Mat lsm = ls.matrixL();
            const Mat lzm = lz.matrixL();
            Eigen::JacobiSVD<Mat> svd(lzm.transpose() * lsm, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Vec sig = svd.singularValues();
            if (sig.size() > 0 && sig.minCoeff() <= 0.0) {
                return false;
            }
            const Vec isq = sig.cwiseSqrt().cwiseInverse();
            w.lambda[j] = sig;
            w.r[j] = lsm * svd.matrixV() * isq.asDiagonal();
            w.rti[j] = lzm * svd.matrixU() * isq.asDiagonal();
        }
        return true;
    }

    // Max step t with lambda + t * delta >= 0 for every block.
    static double max_step(const Scaling& w, const Blocks& delta) {
        double t = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < delta.size(); ++j) {
            const Vec isq = w.lambda[j].cwiseSqrt().cwiseInverse();
            const Mat scaled = isq.asDiagonal() * delta[j] * isq.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(scaled), Eigen::EigenvaluesOnly);
            const double e = es.eigenvalues()(0);
            if (e < 0.0) {
                t = std::min(t, -1.0 / e);
            }
        }
        return t;
    }

    bool step(const Vec& rx, const Blocks& rz, double rt, double mu) {
        Scaling w;
        if (!compute_scaling(w)) {
            return false;
        }
        const std::size_t nb = s_.size();

        // H = sum_j Ahat_j^T Ahat_j with Ahat_j columns vec(rti^T C_k rti).
        Mat h = Mat::Zero(n_, n_);
        for (std::size_t j = 0; j < nb; ++j) {
            const Eigen::Index nj = d_.h[j].rows();
            Mat ahat(nj * nj, n_);
            for (Eigen::Index k = 0; k < n_; ++k) {
                Eigen::Map<const Mat> ck(d_.a[j].col(k).data(), nj, nj);
                Mat t = w.rti[j].transpose() * ck * w.rti[j];
                ahat.col(k) = Eigen::Map<const Vec>(t.data(), nj * nj);
            }
            h.noalias() += ahat.transpose() * ahat;
        }
        Eigen::LLT<Mat> llt;
        if (!factor(h, llt)) {
            return false;
        }

        auto scale_m = [&](const Blocks& b) {
            Blocks out(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                const Mat m = w.rti[j] * w.rti[j].transpose();
                out[j] = symmetrize(m * b[j] * m);
            }
            return out;
        };
        // K [dx; dz] = [b1; b2] with K = [[0, G^T], [G, -W^T W]].
        auto solve_once = [&](const Vec& b1, const Blocks& b2, Vec& dx, Blocks& dz) {
            dx = llt.solve(b1 + apply_gt(scale_m(b2)));
            Blocks t = apply_g(dx);
            axpy(t, -1.0, b2);
            dz = scale_m(t);
        };
        // W^T W (v) = r r^T v r r^T
        auto scale_w2 = [&](const Blocks& b) {
            Blocks out(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                const Mat m = w.r[j] * w.r[j].transpose();
                out[j] = symmetrize(m * b[j] * m);
            }
            return out;
        };
        auto solve_k = [&](const Vec& b1, const Blocks& b2, Vec& dx, Blocks& dz) {
            solve_once(b1, b2, dx, dz);
            for (int refine = 0; refine < 2; ++refine) {
                const Vec e1 = b1 - apply_gt(dz);
                Blocks e2 = b2;
                axpy(e2, -1.0, apply_g(dx));
                axpy(e2, 1.0, scale_w2(dz));
                Vec cx;
                Blocks cz;
                solve_once(e1, e2, cx, cz);
                dx += cx;
                axpy(dz, 1.0, cz);
            }
        };

        const Vec& c = d_.c;
        Vec x1;
        Blocks z1;
        solve_k(-c, d_.h, x1, z1);
        const double denom_base = c.dot(x1) + inner(d_.h, z1);

        Blocks ds_aff;
        Blocks dz_aff;
        double dtau_aff = 0.0;
        double dkappa_aff = 0.0;
        double sigma = 0.0;

        for (int phase = 0; phase < 2; ++phase) {
            const double beta = phase == 0 ? 1.0 : 1.0 - sigma;
            Blocks u(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                const Vec& lam = w.lambda[j];
                Mat rc = Mat::Zero(lam.size(), lam.size());
                rc.diagonal() = -lam.cwiseProduct(lam);
                if (phase == 1) {
                    rc.diagonal().array() += sigma * mu;
                    const Mat prod = ds_aff[j] * dz_aff[j];
                    rc -= 0.5 * (prod + prod.transpose());
                }
                for (Eigen::Index a = 0; a < lam.size(); ++a) {
                    for (Eigen::Index b = 0; b < lam.size(); ++b) {
                        rc(a, b) *= 2.0 / (lam(a) + lam(b));
                    }
                }
                u[j] = rc;
            }
            double rtau = -tau_ * kappa_;
            if (phase == 1) {
                rtau += sigma * mu - dtau_aff * dkappa_aff;
            }
            Blocks b2(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                b2[j] = -beta * rz[j] - w.r[j] * u[j] * w.r[j].transpose();
            }
            Vec x2;
            Blocks z2;
            solve_k(-beta * rx, b2, x2, z2);

            const double denom = denom_base - kappa_ / tau_;
            const double dtau = (-beta * rt - rtau / tau_ - c.dot(x2) - inner(d_.h, z2)) / denom;
            const Vec dx = x2 + dtau * x1;
            Blocks dz = z2;
            axpy(dz, dtau, z1);
            const double dkappa = (rtau - kappa_ * dtau) / tau_;

            Blocks dzs(nb);
            Blocks dss(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                dzs[j] = symmetrize(w.r[j].transpose() * dz[j] * w.r[j]);
                dss[j] = symmetrize(u[j] - dzs[j]);
            }
            double amax = std::min(max_step(w, dzs), max_step(w, dss));
            if (dtau < 0.0) {
                amax = std::min(amax, -tau_ / dtau);
            }
            if (dkappa < 0.0) {
                amax = std::min(amax, -kappa_ / dkappa);
            }
            if (phase == 0) {
                const double alpha = std::min(1.0, amax);
                sigma = std::pow(1.0 - alpha, 3);
                ds_aff = std::move(dss);
                dz_aff = std::move(dzs);
                dtau_aff = dtau;
                dkappa_aff = dkappa;
                continue;
            }
            const double alpha = std::min(1.0, 0.99 * amax);
            if (!(alpha > 0.0) || !std::isfinite(alpha)) {
                return false;
            }
            for (std::size_t j = 0; j < nb; ++j) {
                const Mat ds = w.r[j] * dss[j] * w.r[j].transpose();
                s_[j] = symmetrize(s_[j] + alpha * ds);
                z_[j] = symmetrize(z_[j] + alpha * dz[j]);
            }
            x_ += alpha * dx;
            tau_ += alpha * dtau;
            kappa_ += alpha * dkappa;
        }
        return std::isfinite(tau_) && std::isfinite(kappa_) && tau_ > 0.0 && kappa_ > 0.0;
    }

    const Reduced& d_;
    const SolverSettings& set_;
    Eigen::Index n_ = 0;
    double nu_ = 0.0;
    double resx0_ = 1.0;
    double resz0_ = 1.0;
    Vec x_;
    Blocks s_;
    Blocks z_;
    double tau_ = 1.0;
    double kappa_ = 1.0;
};

void finish(const SdpProblem& problem, const Vec& y, SdpSolution& sol) {
    sol.y = y;
    sol.block_matrices = problem.evaluate(y);
    sol.objective = problem.cost().dot(y);
    sol.min_block_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto& b : sol.block_matrices) {
        sol.min_block_eigenvalue = std::min(sol.min_block_eigenvalue, min_eigenvalue(symmetrize(b)));
    }
    sol.equality_residual = problem.equality_residual(y);
}

} // namespace

SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings) {
    if (problem.total_dimension() > settings.max_dimension) {
        throw std::length_error("SDP block dimension " + std::to_string(problem.total_dimension()) +
                                " exceeds the cap of " + std::to_string(settings.max_dimension));
    }
    const auto m = static_cast<Eigen::Index>(problem.num_variables());
    SdpSolution sol;

    Reduced red;
    red.y0 = Vec::Zero(m);
    const auto& eqs = problem.equalities();
    if (!eqs.empty()) {
        const auto p = static_cast<Eigen::Index>(eqs.size());
        Mat a(p, m);
        Vec b(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            a.row(i) = eqs[static_cast<std::size_t>(i)].row.transpose();
            b(i) = eqs[static_cast<std::size_t>(i)].rhs;
        }
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(a);
        cod.setThreshold(1e-11);
        red.y0 = m == 0 ? Vec::Zero(0) : Vec(cod.solve(b));
        const double tol = 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff());
        if (((a * red.y0) - b).cwiseAbs().maxCoeff() > tol) {
            sol.status = Status::Infeasible;
            finish(problem, red.y0, sol);
            return sol;
        }
        Eigen::ColPivHouseholderQR<Mat> qr(a.transpose());
        qr.setThreshold(1e-11);
        const Eigen::Index rank = qr.rank();
        const Mat q = qr.householderQ();
        red.null_basis = q.rightCols(m - rank);
        red.identity_basis = false;
    }
    const Eigen::Index n = red.identity_basis ? m : red.null_basis.cols();
    red.c = red.identity_basis ? problem.cost() : Vec(red.null_basis.transpose() * problem.cost());
    for (const auto& blk : problem.blocks()) {
        const Eigen::Index nj = blk.size();
        Mat raw(nj * nj, m);
        Mat h = blk.constant;
        for (Eigen::Index i = 0; i < m; ++i) {
            const Mat& ci = blk.coefficients[static_cast<std::size_t>(i)];
            raw.col(i) = Eigen::Map<const Vec>(ci.data(), nj * nj);
            if (!red.identity_basis && red.y0(i) != 0.0) {
                h += red.y0(i) * ci;
            }
        }
        red.h.push_back(h);
        red.a.push_back(red.identity_basis ? raw : Mat(raw * red.null_basis));
    }

    if (n == 0 || problem.blocks().empty()) {
        // Nothing left to optimize over the cone: decide from the constant part.
        Vec y = lift(red, Vec::Zero(n));
        finish(problem, y, sol);
        if (problem.blocks().empty() && n > 0 && red.c.norm() > 0.0) {
            sol.status = Status::Unbounded;
        } else if (sol.min_block_eigenvalue >= -settings.psd_tol) {
            sol.status = Status::Feasible;
        } else {
            sol.status = Status::Infeasible;
        }
        return sol;
    }

    Hsd hsd(red, settings);
    const auto out = hsd.run();
    sol.iterations = out.iterations;
    sol.duality_gap = out.gap;
    finish(problem, lift(red, out.x), sol);
    sol.status = out.status;
    if (sol.status == Status::Optimal && sol.min_block_eigenvalue < -settings.psd_tol) {
        sol.status = Status::NumericalFailure;
    }
    if (sol.status == Status::NumericalFailure && sol.min_block_eigenvalue >= -settings.psd_tol &&
        sol.equality_residual <= settings.psd_tol) {
        sol.status = Status::Feasible;
    }
    return sol;
}

} // namespace agcv::sdp
