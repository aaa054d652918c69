/*
 * Copyright 2026 The cope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cope/gp/regressor.hpp"

#include "cope/common/types.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cope::gp {

namespace {

constexpr std::array<double, 5> kJitterLadder{1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

// Query rows per block of the batched variance solve.
constexpr Eigen::Index kBlock = 256;

} // namespace

GPRegressor::GPRegressor(Kernel kernel, Eigen::Index input_dim, Eigen::Index output_dim)
    : kernel_(std::move(kernel)), X_(0, input_dim), alpha_(0, output_dim),
      clamped_(std::make_shared<std::atomic<std::size_t>>(0))
{
}

GPRegressor GPRegressor::fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Kernel& kernel,
                             double sigma_eps)
{
    if (X.rows() != Y.rows())
        throw std::invalid_argument("gp fit: X and Y row counts differ");
    if (!(sigma_eps >= 0.0 && std::isfinite(sigma_eps)))
        throw std::invalid_argument("gp fit: sigma_eps must be finite and >= 0");
    if (!X.allFinite() || !Y.allFinite())
        throw std::invalid_argument("gp fit: non-finite training data");

    GPRegressor gp(kernel, X.cols(), Y.cols());
    gp.sigma_eps_ = sigma_eps;
    gp.X_ = X;
    const Eigen::Index n = X.rows();
    if (n == 0)
        return gp;

    Eigen::MatrixXd K = kernel.gram(X);
    const double s2 = sigma_eps * sigma_eps;
    K.diagonal().array() += s2;
    gp.llt_.compute(K);
    if (gp.llt_.info() != Eigen::Success) {
        const double mean_diag = K.diagonal().mean();
        bool ok = false;
        for (double rung : kJitterLadder) {
            Eigen::MatrixXd Kj = K;
            Kj.diagonal().array() += rung * mean_diag;
            gp.llt_.compute(Kj);
            if (gp.llt_.info() == Eigen::Success) {
                gp.jitter_ = rung * mean_diag;
                ok = true;
                break;
            }
        }
        if (!ok) {
            std::ostringstream msg;
            msg << "gp fit: Cholesky failed for n = " << n << " after jitter up to "
                << kJitterLadder.back() * mean_diag << " (mean diagonal " << mean_diag << ", sigma_eps " << sigma_eps
                << ")";
            throw FitError(msg.str());
        }
    }
    gp.alpha_ = gp.llt_.solve(Y);

    if (sigma_eps > 0.0) {
        if (gp.jitter_ == 0.0) {
            // det(K + s2 I) = s2^n det(I + K / s2)
            const double logdet = 2.0 * gp.llt_.matrixL().toDenseMatrix().diagonal().array().log().sum();
            gp.info_gain_ = std::max(0.0, 0.5 * (logdet - static_cast<double>(n) * std::log(s2)));
        } else {
            gp.info_gain_ = gp::information_gain(kernel, X, sigma_eps);
        }
    }
    return gp;
}

Posterior GPRegressor::predict(const Eigen::MatrixXd& Xq) const
{
    if (Xq.cols() != input_dim())
        throw std::invalid_argument("gp predict: input dimension mismatch");
    const Eigen::Index m = Xq.rows();
    Posterior post{Eigen::MatrixXd::Zero(m, output_dim()), kernel_.diag(Xq)};
    if (size() == 0 || m == 0)
        return post;

    std::size_t clamped = 0;
    const Eigen::Index blocks = (m + kBlock - 1) / kBlock;
#pragma omp parallel for schedule(dynamic) reduction(+ : clamped) if (blocks > 1)
    for (Eigen::Index b = 0; b < blocks; ++b) {
        const Eigen::Index begin = b * kBlock;
        const Eigen::Index len = std::min(kBlock, m - begin);
        const Eigen::MatrixXd Ks = kernel_.cross(X_, Xq.middleRows(begin, len)); // n x len
        post.mean.middleRows(begin, len).noalias() = Ks.transpose() * alpha_;
        const Eigen::MatrixXd V = llt_.matrixL().solve(Ks);
        const Eigen::VectorXd reduction = V.colwise().squaredNorm().transpose();
        for (Eigen::Index i = 0; i < len; ++i) {
            double v = post.variance[begin + i] - reduction[i];
            if (v < 0.0) {
                v = 0.0;
                ++clamped;
            }
            post.variance[begin + i] = v;
        }
    }
    if (clamped > 0)
        clamped_->fetch_add(clamped);
    return post;
}

Posterior GPRegressor::predict_one(const Eigen::VectorXd& x) const
{
    if (x.size() != input_dim())
        throw std::invalid_argument("gp predict: input dimension mismatch");
    Posterior post{Eigen::MatrixXd::Zero(1, output_dim()), Eigen::VectorXd::Constant(1, kernel_(x, x))};
    if (size() == 0)
        return post;
    Eigen::VectorXd k(size());
    for (Eigen::Index i = 0; i < size(); ++i)
        k[i] = kernel_(X_.row(i).transpose(), x);
    post.mean.row(0) = k.transpose() * alpha_;
    const Eigen::VectorXd v = llt_.matrixL().solve(k);
    double var = post.variance[0] - v.squaredNorm();
    if (var < 0.0) {
        var = 0.0;
        clamped_->fetch_add(1);
    }
    post.variance[0] = var;
    return post;
}

double information_gain(const Kernel& kernel, const Eigen::MatrixXd& X, double sigma_eps)
{
    if (X.rows() == 0)
        return 0.0;
    if (!(sigma_eps > 0.0))
        throw std::invalid_argument("information_gain: sigma_eps must be > 0");
    Eigen::MatrixXd M = kernel.gram(X) / (sigma_eps * sigma_eps);
    M.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw FitError("information_gain: I + K / sigma^2 is not positive definite");
    return std::max(0.0, llt.matrixL().toDenseMatrix().diagonal().array().log().sum());
}

double beta_n(double B, double sigma_eps, double gamma_n, int d_s, double delta)
{
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::invalid_argument("beta_n: delta must be in (0, 1]");
    if (!(B >= 0.0) || !(gamma_n >= 0.0) || !(sigma_eps >= 0.0) || d_s < 1)
        throw std::invalid_argument("beta_n: B, gamma_n, sigma_eps must be >= 0 and d_s >= 1");
    return B + sigma_eps * std::sqrt(2.0 * (gamma_n + 1.0 + std::log(static_cast<double>(d_s) / delta)));
}

double gamma_rate_bound(const Kernel& kernel, int input_dim, std::size_t n, double c)
{
    if (input_dim < 1 || !(c >= 0.0))
        throw std::invalid_argument("gamma_rate_bound: invalid dimension or constant");
    const double d = input_dim;
    const double logn = std::log1p(static_cast<double>(n));
    switch (kernel.type()) {
    case KernelType::Linear:
        return c * d * logn;
    case KernelType::RBF:
        return c * std::pow(logn, d + 1.0);
    case KernelType::Matern: {
        const double nu = kernel.nu();
        return c * std::pow(static_cast<double>(n), d / (2.0 * nu + d)) * std::pow(logn, 2.0 * nu / (2.0 * nu + d));
    }
    }
    return 0.0;
}

double coverage_check(const Posterior& posterior, double beta, const Eigen::MatrixXd& truth)
{
    if (truth.rows() != posterior.mean.rows() || truth.cols() != posterior.mean.cols())
        throw std::invalid_argument("coverage_check: truth shape mismatch");
    if (truth.size() == 0)
        throw std::invalid_argument("coverage_check: no probes");
    std::size_t hit = 0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
        const double width = beta * std::sqrt(posterior.variance[i]);
        for (Eigen::Index j = 0; j < truth.cols(); ++j)
            if (std::abs(posterior.mean(i, j) - truth(i, j)) <= width)
                ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

} // namespace cope::gp
