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

#include "cope/gp/regressor.hpp"
#include "cope/mdp/dataset.hpp"
#include "cope/mdp/model.hpp"

#include <functional>

namespace cope::gp {

enum class GammaMode { Empirical, RateBound };

GammaMode parse_gamma_mode(const std::string& name);
std::string to_string(GammaMode mode);

struct GPConfig {
    Kernel kernel = Kernel::rbf(1.0);
    double sigma_eps = 0.01;
    /// RKHS norm bound.
    double B = 2.0;
    double delta = 0.1;
    GammaMode gamma_mode = GammaMode::Empirical;
    /// Constant of the growth-rate bound when gamma_mode is RateBound.
    double rate_constant = 1.0;
    mdp::TargetMode target = mdp::TargetMode::NextState;
    /// Per-input-dimension divisor applied before the kernel; empty means all ones.
    Eigen::VectorXd input_scale;
};

/// One GP per state dimension on inputs (s, a), with the calibrated scale beta_n.
class GPModel final : public mdp::StatisticalModel {
public:
    /// Fits on the training split of `data` (the calibration split is ignored).
    static GPModel fit(const mdp::Dataset& data, const GPConfig& config, const mdp::StateTopology& topology);

    int state_dim() const override { return d_s_; }
    int action_dim() const override { return d_a_; }
    mdp::ModelPrediction predict(const Batch& states, const Batch& actions) const override;
    Eigen::VectorXd confidence_scale() const override { return Eigen::VectorXd::Constant(d_s_, beta_); }

    const GPConfig& config() const { return config_; }
    const GPRegressor& regressor() const { return reg_; }
    double beta() const { return beta_; }
    double gamma() const { return gamma_; }
    /// L_sigma = sqrt(d_s) L_k, with respect to the unscaled inputs.
    double sigma_lipschitz() const;
    /// L_f = sqrt(d_s) B L_k for any f in the RKHS ball of radius B.
    double f_lipschitz() const;

    /// Scaled input matrix [s a] / input_scale for a batch of queries.
    Eigen::MatrixXd scaled_inputs(const Batch& states, const Batch& actions) const;

private:
    GPModel(GPConfig config, GPRegressor reg, int d_s, int d_a);

    GPConfig config_;
    GPRegressor reg_;
    int d_s_;
    int d_a_;
    double gamma_ = 0.0;
    double beta_ = 0.0;
};

} // namespace cope::gp
