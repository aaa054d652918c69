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

#include "cope/gp/gp_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cope::gp {

GammaMode parse_gamma_mode(const std::string& name)
{
    if (name == "empirical")
        return GammaMode::Empirical;
    if (name == "rate-bound")
        return GammaMode::RateBound;
    throw std::invalid_argument("unknown gamma mode '" + name + "' (expected empirical or rate-bound)");
}

std::string to_string(GammaMode mode)
{
    return mode == GammaMode::Empirical ? "empirical" : "rate-bound";
}

GPModel::GPModel(GPConfig config, GPRegressor reg, int d_s, int d_a)
    : config_(std::move(config)), reg_(std::move(reg)), d_s_(d_s), d_a_(d_a)
{
}

GPModel GPModel::fit(const mdp::Dataset& data, const GPConfig& config, const mdp::StateTopology& topology)
{
    const int d_s = data.state_dim();
    const int d_a = data.action_dim();
    GPConfig cfg = config;
    if (cfg.input_scale.size() == 0)
        cfg.input_scale = Eigen::VectorXd::Ones(d_s + d_a);
    if (cfg.input_scale.size() != d_s + d_a || !(cfg.input_scale.array() > 0.0).all())
        throw std::invalid_argument("gp model: input_scale must have d_s + d_a positive entries");

    const mdp::Dataset train = data.subset(data.training_indices());
    const Eigen::MatrixXd X = train.inputs().array().rowwise() / cfg.input_scale.transpose().array();
    const Eigen::MatrixXd Y = mdp::make_targets(train, cfg.target, topology);
    GPRegressor reg = GPRegressor::fit(X, Y, cfg.kernel, cfg.sigma_eps);

    GPModel model(std::move(cfg), std::move(reg), d_s, d_a);
    const GPConfig& c = model.config_;
    model.gamma_ = c.gamma_mode == GammaMode::Empirical
                       ? model.reg_.information_gain()
                       : gamma_rate_bound(c.kernel, d_s + d_a, train.size(), c.rate_constant);
    model.beta_ = beta_n(c.B, c.sigma_eps, model.gamma_, d_s, c.delta);
    return model;
}

Eigen::MatrixXd GPModel::scaled_inputs(const Batch& states, const Batch& actions) const
{
    if (states.cols() != d_s_ || actions.cols() != d_a_ || states.rows() != actions.rows())
        throw std::invalid_argument("gp model: query dimension mismatch");
    Eigen::MatrixXd X(states.rows(), d_s_ + d_a_);
    X << states, actions;
    return X.array().rowwise() / config_.input_scale.transpose().array();
}

mdp::ModelPrediction GPModel::predict(const Batch& states, const Batch& actions) const
{
    const Posterior post = reg_.predict(scaled_inputs(states, actions));
    mdp::ModelPrediction out;
    out.mean = post.mean;
    if (config_.target == mdp::TargetMode::Delta)
        out.mean += states;
    const Eigen::VectorXd sd = post.variance.array().sqrt();
    out.epistemic_std = sd.replicate(1, d_s_);
    out.aleatoric_var = Batch::Constant(states.rows(), d_s_, config_.sigma_eps * config_.sigma_eps);
    return out;
}

double GPModel::sigma_lipschitz() const
{
    return std::sqrt(static_cast<double>(d_s_)) * config_.kernel.lipschitz_constant() / config_.input_scale.minCoeff();
}

double GPModel::f_lipschitz() const
{
    return config_.B * sigma_lipschitz();
}

} // namespace cope::gp
