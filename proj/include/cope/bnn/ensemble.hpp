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
#include "cope/mdp/dataset.hpp"
#include "cope/mdp/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cope::bnn {

/// Per-column affine standardization.
struct Normalizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;

    /// Column mean and std of X; std entries below 1e-8 are replaced by 1.
    static Normalizer fit(const Eigen::MatrixXd& X);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct SVGDConfig {
    int K = 5;
    std::vector<int> hidden{64, 64};
    double prior_temp = 1e-3;
    double kernel_lengthscale = 10.0;
    bool median_heuristic = false;
    int batch_size = 64;
    double learning_rate = 3e-3;
    int max_epochs = 300;
    int patience = 10;
    /// Tail fraction of the training split held out for early stopping.
    double validation_fraction = 0.1;
    mdp::TargetMode target = mdp::TargetMode::NextState;
    std::uint64_t seed = 0;
};

struct TrainingReport {
    int epochs = 0;
    int best_epoch = 0;
    /// Mean held-out mixture log-likelihood (standardized targets).
    double initial_validation_ll = 0.0;
    double best_validation_ll = 0.0;
};

/// Equally weighted Gaussian mixture over the K members, in environment units.
struct PredictiveMixture {
    std::vector<Eigen::MatrixXd> member_mean;
    std::vector<Eigen::MatrixXd> member_var;
    Eigen::MatrixXd mean;          // mu_Theta
    Eigen::MatrixXd epistemic_var; // mean_k (h_k - mu_Theta)^2
    Eigen::MatrixXd aleatoric_var; // mean_k nu_k^2

    Eigen::MatrixXd total_var() const { return epistemic_var + aleatoric_var; }
    /// log (1/K) sum_k N(y; h_k(row), diag nu_k^2(row)).
    double log_density(Eigen::Index row, const Eigen::VectorXd& y) const;
};

/// Aggregates per-member predictions into the mixture moments.
PredictiveMixture make_mixture(std::vector<Eigen::MatrixXd> member_mean, std::vector<Eigen::MatrixXd> member_var);

/// SVGD particle ensemble of probabilistic MLPs with a per-dimension
/// calibration scale for the epistemic std.
class Ensemble final : public mdp::StatisticalModel {
public:
    Ensemble(MLPArch arch, std::vector<Eigen::VectorXd> particles, Normalizer input_norm, Normalizer target_norm,
             mdp::TargetMode target, double prior_temp);

    /// Trains on the training split of `data` (the calibration split is not touched).
    static Ensemble train(const mdp::Dataset& data, const SVGDConfig& config, const mdp::StateTopology& topology,
                          TrainingReport* report = nullptr);

    int state_dim() const override { return arch_.target_dim; }
    int action_dim() const override { return arch_.input_dim - arch_.target_dim; }
    int size() const { return static_cast<int>(particles_.size()); }

    const MLPArch& arch() const { return arch_; }
    const std::vector<Eigen::VectorXd>& particles() const { return particles_; }
    const Normalizer& input_normalizer() const { return input_norm_; }
    const Normalizer& target_normalizer() const { return target_norm_; }
    mdp::TargetMode target() const { return target_; }
    double prior_temp() const { return prior_temp_; }
    const Eigen::VectorXd& calib_tau() const { return calib_tau_; }
    void set_calib_tau(Eigen::VectorXd tau);

    /// Member k's next-state mean and aleatoric variance, in environment units.
    void member_predict(int k, const Batch& states, const Batch& actions, Eigen::MatrixXd& mean,
                        Eigen::MatrixXd& var) const;
    PredictiveMixture mixture(const Batch& states, const Batch& actions) const;

    /// mean mu_Theta, epistemic_std sqrt(sigma^2_e) (before calib_tau), aleatoric_var sigma^2_a.
    mdp::ModelPrediction predict(const Batch& states, const Batch& actions) const override;
    Eigen::VectorXd confidence_scale() const override { return calib_tau_; }

    /// Residuals (topology-aware) and total predictive std on the transitions `indices` of `data`.
    void residuals(const mdp::Dataset& data, const std::vector<std::size_t>& indices,
                   const mdp::StateTopology& topology, Eigen::MatrixXd& residual, Eigen::MatrixXd& sd) const;
    double calibration_error(const mdp::Dataset& data, const std::vector<std::size_t>& indices,
                             const mdp::StateTopology& topology, const Eigen::VectorXd& tau) const;
    /// Sets calib_tau from the calibration split of `data` and returns it.
    Eigen::VectorXd recalibrate(const mdp::Dataset& data, const mdp::StateTopology& topology);

    std::string to_json() const;
    static Ensemble from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static Ensemble load(const std::filesystem::path& path);

private:
    MLPArch arch_;
    std::vector<Eigen::VectorXd> particles_;
    Normalizer input_norm_;
    Normalizer target_norm_;
    mdp::TargetMode target_;
    double prior_temp_;
    Eigen::VectorXd calib_tau_;
};

} // namespace cope::bnn
