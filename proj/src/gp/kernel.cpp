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

#include "cope/gp/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace cope::gp {

Kernel::Kernel(KernelType type, double lengthscale, double nu) : type_(type), lengthscale_(lengthscale), nu_(nu)
{
    if (type_ != KernelType::Linear && !(lengthscale_ > 0.0 && std::isfinite(lengthscale_)))
        throw std::invalid_argument("kernel lengthscale must be positive and finite");
    if (type_ == KernelType::Matern && nu_ != 1.5 && nu_ != 2.5)
        throw std::invalid_argument("Matern kernel supports nu = 1.5 or 2.5 only");
}

Kernel Kernel::linear() { return Kernel(KernelType::Linear, 1.0, 0.0); }
Kernel Kernel::rbf(double lengthscale) { return Kernel(KernelType::RBF, lengthscale, 0.0); }
Kernel Kernel::matern(double nu, double lengthscale) { return Kernel(KernelType::Matern, lengthscale, nu); }

Kernel Kernel::from_name(const std::string& name, double lengthscale, double nu)
{
    if (name == "linear")
        return linear();
    if (name == "rbf")
        return rbf(lengthscale);
    if (name == "matern")
        return matern(nu, lengthscale);
    throw std::invalid_argument("unknown kernel '" + name + "' (expected linear, rbf or matern)");
}

std::string Kernel::name() const
{
    switch (type_) {
    case KernelType::Linear:
        return "linear";
    case KernelType::RBF:
        return "rbf";
    case KernelType::Matern:
        return "matern";
    }
    return "?";
}

double Kernel::of_distance(double r) const
{
    const double u = r / lengthscale_;
    if (type_ == KernelType::RBF)
        return std::exp(-0.5 * u * u);
    if (nu_ == 1.5) {
        const double a = std::sqrt(3.0) * u;
        return (1.0 + a) * std::exp(-a);
    }
    const double a = std::sqrt(5.0) * u;
    return (1.0 + a + a * a / 3.0) * std::exp(-a);
}

double Kernel::operator()(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const
{
    if (x.size() != y.size())
        throw std::invalid_argument("kernel: input dimension mismatch");
    if (type_ == KernelType::Linear)
        return x.dot(y);
    return of_distance((x - y).norm());
}

Eigen::MatrixXd Kernel::cross(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) const
{
    if (X.cols() != Z.cols())
        throw std::invalid_argument("kernel: input dimension mismatch");
    Eigen::MatrixXd K = X * Z.transpose();
    if (type_ == KernelType::Linear)
        return K;
    const Eigen::VectorXd xn = X.rowwise().squaredNorm();
    const Eigen::VectorXd zn = Z.rowwise().squaredNorm();
    const double inv_l2 = 1.0 / (lengthscale_ * lengthscale_);
#pragma omp parallel for schedule(static) if (K.size() > 65536)
    for (Eigen::Index j = 0; j < K.cols(); ++j)
        for (Eigen::Index i = 0; i < K.rows(); ++i) {
            const double d2 = std::max(0.0, xn[i] + zn[j] - 2.0 * K(i, j));
            if (type_ == KernelType::RBF)
                K(i, j) = std::exp(-0.5 * d2 * inv_l2);
            else
                K(i, j) = of_distance(std::sqrt(d2));
        }
    return K;
}

Eigen::VectorXd Kernel::diag(const Eigen::MatrixXd& Z) const
{
    if (type_ == KernelType::Linear)
        return Z.rowwise().squaredNorm();
    return Eigen::VectorXd::Ones(Z.rows());
}

double Kernel::metric(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) const
{
    if (type_ == KernelType::Linear)
        return (x - y).norm();
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * (*this)(x, y)));
}

double Kernel::lipschitz_constant() const
{
    switch (type_) {
    case KernelType::Linear:
        return 1.0;
    case KernelType::RBF:
        return 1.0 / lengthscale_;
    case KernelType::Matern:
        return std::sqrt(nu_ / (nu_ - 1.0)) / lengthscale_;
    }
    return 0.0;
}

} // namespace cope::gp
