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

#include "cope/bnn/mlp.hpp"

#include <vector>

namespace cope::bnn {

/// k(a, b) = exp(-||a - b||^2 / (2 l)).
double particle_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double lengthscale);

/// Median heuristic for the particle kernel: l = med^2 / (2 log(K + 1)).
double median_lengthscale(const std::vector<Eigen::VectorXd>& particles);

/// SVGD direction
/// phi_k = 1/K sum_k' [k(theta_k', theta_k) g_k' + grad_{theta_k'} k(theta_k', theta_k)]
/// for particles theta and log-posterior gradients g.
std::vector<Eigen::VectorXd> svgd_direction(const std::vector<Eigen::VectorXd>& particles,
                                            const std::vector<Eigen::VectorXd>& grads, double lengthscale);

/// Gradients of log_posterior for every particle (OpenMP over particles).
/// Returns the log-posterior values.
std::vector<double> particle_gradients(const MLPArch& arch, const std::vector<Eigen::VectorXd>& particles,
                                       const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double prior_temp,
                                       double likelihood_scale, std::vector<Eigen::VectorXd>& grads);

/// theta_k <- theta_k + step * phi_k on the batch (X, Y).
std::vector<Eigen::VectorXd> svgd_step(const MLPArch& arch, const std::vector<Eigen::VectorXd>& particles,
                                       const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double prior_temp,
                                       double likelihood_scale, double lengthscale, double step);

} // namespace cope::bnn
