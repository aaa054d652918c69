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

#include <Eigen/Core>

#include <string>

namespace cope::gp {

enum class KernelType { Linear, RBF, Matern };

/// Stationary (RBF, Matern) or dot-product (Linear) covariance function with unit amplitude.
class Kernel {
public:
    static Kernel linear();
    static Kernel rbf(double lengthscale);
    /// nu must be 1.5 or 2.5.
    static Kernel matern(double nu, double lengthscale);
    /// "linear", "rbf" or "matern".
    static Kernel from_name(const std::string& name, double lengthscale, double nu);

    KernelType type() const { return type_; }
    double lengthscale() const { return lengthscale_; }
    double nu() const { return nu_; }
    std::string name() const;

    double operator()(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const;

    /// K(X, Z): rows of X against rows of Z.
    Eigen::MatrixXd cross(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) const;
    Eigen::MatrixXd gram(const Eigen::MatrixXd& X) const { return cross(X, X); }
    /// k(z, z) for every row z of Z.
    Eigen::VectorXd diag(const Eigen::MatrixXd& Z) const;

    /// d_k(x, y) = sqrt(k(x,x) + k(y,y) - 2k(x,y)).
    double metric(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const;

    /// L_k with d_k(x, y) <= L_k ||x - y||: 1 (linear), 1/l (RBF), sqrt(nu/(nu-1))/l (Matern).
    double lipschitz_constant() const;

private:
    Kernel(KernelType type, double lengthscale, double nu);

    double of_distance(double r) const;

    KernelType type_;
    double lengthscale_;
    double nu_;
};

} // namespace cope::gp
