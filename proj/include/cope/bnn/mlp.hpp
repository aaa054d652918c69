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

#include "cope/common/rng.hpp"

#include <Eigen/Core>

#include <vector>

namespace cope::bnn {

/// Fully connected ReLU network in -> hidden... -> 2 * out_dim. The first
/// out_dim outputs are the mean, the rest the raw aleatoric pre-activation.
struct MLPArch {
    int input_dim = 0;
    std::vector<int> hidden;
    int target_dim = 0;

    int output_dim() const { return 2 * target_dim; }
    /// Layer widths including input and output.
    std::vector<int> widths() const;
    Eigen::Index num_params() const;
    void validate() const;

    bool operator==(const MLPArch&) const = default;
};

/// Floor added to softplus(raw) before squaring into a variance.
inline constexpr double kStdFloor = 1e-4;

double softplus(double x);
double sigmoid(double x);

struct MLPOutput {
    Eigen::MatrixXd mean; // B x target_dim
    Eigen::MatrixXd var;  // B x target_dim, (softplus(raw) + floor)^2
};

/// Batched forward pass; rows of X are samples. Parameters are stored layer by
/// layer as a column-major (out x in) weight block followed by the bias.
MLPOutput mlp_forward(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X);

/// Gaussian log-likelihood sum_i sum_j log N(y_ij; h_ij, v_ij). When `grad` is
/// non-null it receives d/dtheta (resized as needed).
double log_likelihood(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, Eigen::VectorXd* grad);

/// log N(theta; 0, I).
double log_prior(const Eigen::VectorXd& theta, Eigen::VectorXd* grad);

/// likelihood_scale * log_likelihood + prior_temp * log_prior, with gradient.
double log_posterior(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, double prior_temp, double likelihood_scale, Eigen::VectorXd* grad);

/// He-normal weights, zero biases.
Eigen::VectorXd init_params(const MLPArch& arch, Rng& rng);

} // namespace cope::bnn
