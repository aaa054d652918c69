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

// Independent reference computations used by the unit and acceptance tests.

#include "cope/common/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace cope::oracle {

/// Kernel value from the textbook formulas (unit amplitude).
inline double kernel(const std::string& name, double ell, double nu, const Eigen::VectorXd& x, const Eigen::VectorXd& y)
{
    if (name == "linear")
        return x.dot(y);
    const double r = (x - y).norm() / ell;
    if (name == "rbf")
        return std::exp(-0.5 * r * r);
    if (nu == 1.5)
        return (1.0 + std::sqrt(3.0) * r) * std::exp(-std::sqrt(3.0) * r);
    return (1.0 + std::sqrt(5.0) * r + 5.0 * r * r / 3.0) * std::exp(-std::sqrt(5.0) * r);
}

inline Eigen::MatrixXd gram(const std::string& name, double ell, double nu, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B)
{
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j)
            K(i, j) = kernel(name, ell, nu, A.row(i).transpose(), B.row(j).transpose());
    return K;
}

struct DensePosterior {
    Eigen::MatrixXd mean;
    Eigen::VectorXd variance;
};

/// GP posterior through an explicit inverse of K + s^2 I.
inline DensePosterior gp_posterior(const std::string& name, double ell, double nu, const Eigen::MatrixXd& X,
                                   const Eigen::MatrixXd& Y, double sigma, const Eigen::MatrixXd& Xq)
{
    Eigen::MatrixXd K = gram(name, ell, nu, X, X);
    K.diagonal().array() += sigma * sigma;
    const Eigen::MatrixXd Kinv = K.inverse();
    const Eigen::MatrixXd Ks = gram(name, ell, nu, Xq, X);
    DensePosterior p;
    p.mean = Ks * Kinv * Y;
    p.variance.resize(Xq.rows());
    for (Eigen::Index i = 0; i < Xq.rows(); ++i) {
        const double prior = kernel(name, ell, nu, Xq.row(i).transpose(), Xq.row(i).transpose());
        p.variance[i] = std::max(0.0, prior - Ks.row(i).dot(Kinv * Ks.row(i).transpose()));
    }
    return p;
}

/// 1/2 log det(I + s^-2 K) from the eigenvalues of K.
inline double information_gain(const Eigen::MatrixXd& K, double sigma)
{
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < K.rows(); ++i)
        sum += std::log1p(std::max(0.0, es.eigenvalues()[i]) / (sigma * sigma));
    return 0.5 * sum;
}

/// Draws f ~ GP(0, k) jointly at the rows of Z.
inline Eigen::VectorXd sample_prior(const std::string& name, double ell, double nu, const Eigen::MatrixXd& Z, Rng& rng)
{
    Eigen::MatrixXd K = gram(name, ell, nu, Z, Z);
    K.diagonal().array() += 1e-10;
    const Eigen::MatrixXd L = K.llt().matrixL();
    Eigen::VectorXd z(Z.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i)
        z[i] = rng.normal();
    return L * z;
}

} // namespace cope::oracle
