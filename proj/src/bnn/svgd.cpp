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

#include "cope/bnn/svgd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cope::bnn {

double particle_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double lengthscale)
{
    return std::exp(-(a - b).squaredNorm() / (2.0 * lengthscale));
}

double median_lengthscale(const std::vector<Eigen::VectorXd>& particles)
{
    std::vector<double> d;
    for (std::size_t i = 0; i < particles.size(); ++i)
        for (std::size_t j = i + 1; j < particles.size(); ++j)
            d.push_back((particles[i] - particles[j]).norm());
    if (d.empty())
        return 1.0;
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    const double med = d[d.size() / 2];
    const double l = med * med / (2.0 * std::log(static_cast<double>(particles.size()) + 1.0));
    return l > 0.0 ? l : 1.0;
}

std::vector<Eigen::VectorXd> svgd_direction(const std::vector<Eigen::VectorXd>& particles,
                                            const std::vector<Eigen::VectorXd>& grads, double lengthscale)
{
    const std::size_t K = particles.size();
    if (K == 0 || grads.size() != K)
        throw std::invalid_argument("svgd: particle and gradient counts differ");
    if (!(lengthscale > 0.0))
        throw std::invalid_argument("svgd: lengthscale must be > 0");
    const Eigen::Index P = particles[0].size();
    Eigen::MatrixXd Theta(P, static_cast<Eigen::Index>(K));
    Eigen::MatrixXd G(P, static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k) {
        if (particles[k].size() != P || grads[k].size() != P)
            throw std::invalid_argument("svgd: particles differ in size");
        Theta.col(static_cast<Eigen::Index>(k)) = particles[k];
        G.col(static_cast<Eigen::Index>(k)) = grads[k];
    }
    const Eigen::VectorXd sq = Theta.colwise().squaredNorm().transpose();
    Eigen::MatrixXd D = -2.0 * Theta.transpose() * Theta;
    D.colwise() += sq;
    D.rowwise() += sq.transpose();
    D.diagonal().setZero();
    const Eigen::MatrixXd Kmat = (-D.cwiseMax(0.0) / (2.0 * lengthscale)).array().exp().matrix();
    // sum_k' grad_{theta_k'} k(theta_k', theta_k) = (theta_k sum_k' k_k'k - sum_k' k_k'k theta_k') / l
    const Eigen::VectorXd colsum = Kmat.colwise().sum().transpose();
    const Eigen::MatrixXd Phi =
        (G * Kmat + (Theta * colsum.asDiagonal() - Theta * Kmat) / lengthscale) / static_cast<double>(K);
    std::vector<Eigen::VectorXd> out(K);
    for (std::size_t k = 0; k < K; ++k)
        out[k] = Phi.col(static_cast<Eigen::Index>(k));
    return out;
}

std::vector<double> particle_gradients(const MLPArch& arch, const std::vector<Eigen::VectorXd>& particles,
                                       const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double prior_temp,
                                       double likelihood_scale, std::vector<Eigen::VectorXd>& grads)
{
    const auto K = static_cast<std::ptrdiff_t>(particles.size());
    grads.resize(particles.size());
    std::vector<double> values(particles.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < K; ++k)
        values[static_cast<std::size_t>(k)] = log_posterior(arch, particles[static_cast<std::size_t>(k)], X, Y,
                                                            prior_temp, likelihood_scale,
                                                            &grads[static_cast<std::size_t>(k)]);
    return values;
}

std::vector<Eigen::VectorXd> svgd_step(const MLPArch& arch, const std::vector<Eigen::VectorXd>& particles,
                                       const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double prior_temp,
                                       double likelihood_scale, double lengthscale, double step)
{
    std::vector<Eigen::VectorXd> grads;
    particle_gradients(arch, particles, X, Y, prior_temp, likelihood_scale, grads);
    const std::vector<Eigen::VectorXd> phi = svgd_direction(particles, grads, lengthscale);
    std::vector<Eigen::VectorXd> out(particles.size());
    for (std::size_t k = 0; k < particles.size(); ++k)
        out[k] = particles[k] + step * phi[k];
    return out;
}

} // namespace cope::bnn
