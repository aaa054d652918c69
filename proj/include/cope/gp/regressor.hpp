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

#pragma once

#include "cope/gp/kernel.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <atomic>
#include <memory>

namespace cope::gp {

struct Posterior {
    Eigen::MatrixXd mean;     // m x p
    Eigen::VectorXd variance; // m, shared by all p outputs, clamped at 0
};

/// Zero-mean GP regression of p outputs that share inputs, kernel and noise.
/// Immutable after fit and safe to query concurrently.
class GPRegressor {
public:
    /// Factorizes K + sigma_eps^2 I once. When the factorization fails a
    /// jitter of 1e-10, 1e-9, ..., 1e-6 times the mean diagonal is added in
    /// turn; FitError if all fail. X may have zero rows.
    static GPRegressor fit(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const Kernel& kernel,
                           double sigma_eps);

    const Kernel& kernel() const { return kernel_; }
    double sigma_eps() const { return sigma_eps_; }
    Eigen::Index size() const { return X_.rows(); }
    Eigen::Index input_dim() const { return X_.cols(); }
    Eigen::Index output_dim() const { return alpha_.cols(); }
    const Eigen::MatrixXd& inputs() const { return X_; }
    const Eigen::MatrixXd& alpha() const { return alpha_; }
    double jitter() const { return jitter_; }

    /// Batched posterior at the rows of Xq.
    Posterior predict(const Eigen::MatrixXd& Xq) const;
    /// Reference path for one query point.
    Posterior predict_one(const Eigen::VectorXd& x) const;

    /// 1/2 log det(I + sigma_eps^-2 K) of the training inputs.
    double information_gain() const { return info_gain_; }
    /// Number of negative variances clamped to zero so far.
    std::size_t clamped_variances() const { return clamped_->load(); }

private:
    GPRegressor(Kernel kernel, Eigen::Index input_dim, Eigen::Index output_dim);

    Kernel kernel_;
    double sigma_eps_ = 0.0;
    Eigen::MatrixXd X_;
    Eigen::MatrixXd alpha_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double jitter_ = 0.0;
    double info_gain_ = 0.0;
    std::shared_ptr<std::atomic<std::size_t>> clamped_;
};

/// 1/2 log det(I + sigma_eps^-2 K(X, X)); 0 for empty X.
double information_gain(const Kernel& kernel, const Eigen::MatrixXd& X, double sigma_eps);

/// beta_n(delta) = B + sigma_eps sqrt(2 (gamma_n + 1 + ln(d_s / delta))).
double beta_n(double B, double sigma_eps, double gamma_n, int d_s, double delta);

/// Growth-rate bound on the maximum information capacity, up to the constant c:
/// linear c d log n, RBF c (log n)^(d+1), Matern c n^(d/(2nu+d)) (log n)^(2nu/(2nu+d)).
/// log n is taken as log(1 + n) so the bound is 0 at n = 0.
double gamma_rate_bound(const Kernel& kernel, int input_dim, std::size_t n, double c);

/// Fraction of (probe, output) pairs with |mu - truth| <= beta * sigma.
double coverage_check(const Posterior& posterior, double beta, const Eigen::MatrixXd& truth);

} // namespace cope::gp
