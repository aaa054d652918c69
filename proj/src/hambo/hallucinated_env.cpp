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

#include "cope/hambo/hallucinated_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cope::hambo {

std::string to_string(StepMode mode)
{
    switch (mode) {
    case StepMode::CA:
        return "ca";
    case StepMode::DS:
        return "ds";
    case StepMode::TS1:
        return "ts1";
    case StepMode::DA1:
        return "da1";
    case StepMode::Member:
        return "member";
    }
    return "?";
}

namespace {

// mean + scale * eta * sigma_e, checking that the shift stays in the confidence cube.
Batch shifted_mean(const HallucinatedEnv::Setup& setup, const mdp::ModelPrediction& pred, const Batch& states,
                   const Batch& actions)
{
    if (!setup.continuous)
        return pred.mean;
    const Batch eta = setup.continuous->eta(states, actions);
    const Eigen::VectorXd scale = setup.model->confidence_scale();
    const Batch radius = pred.epistemic_std.array().rowwise() * scale.transpose().array();
    const Batch shift = radius.cwiseProduct(eta);
    if ((shift.cwiseAbs().array() > radius.array() * (1.0 + 1e-12)).any())
        throw std::logic_error("hallucinated env: mean left the confidence cube");
    return pred.mean + shift;
}

} // namespace

HallucinatedEnv::HallucinatedEnv(const mdp::Task& task, Setup setup) : mdp::Environment(task), setup_(std::move(setup))
{
    const bool member_mode =
        setup_.mode == StepMode::TS1 || setup_.mode == StepMode::DA1 || setup_.mode == StepMode::Member;
    if (member_mode && !setup_.ensemble)
        throw std::invalid_argument("hallucinated env: mode '" + to_string(setup_.mode) + "' needs an ensemble");
    if (!setup_.model && setup_.ensemble)
        setup_.model = setup_.ensemble;
    if (!setup_.model)
        throw std::invalid_argument("hallucinated env: no model");
    if (setup_.model->state_dim() != task.state_dim || setup_.model->action_dim() != task.action_dim)
        throw std::invalid_argument("hallucinated env: model dimensions do not match the environment");
    if (setup_.mode == StepMode::DA1 && !setup_.discrete)
        throw std::invalid_argument("hallucinated env: DA1 needs a discrete adversary");
    if (setup_.mode == StepMode::Member && (setup_.member < 0 || setup_.member >= setup_.ensemble->size()))
        throw std::invalid_argument("hallucinated env: member index out of range");
}

Batch HallucinatedEnv::hallucinated_mean(const Batch& states, const Batch& actions) const
{
    return shifted_mean(setup_, setup_.model->predict(states, actions), states, actions);
}

Batch HallucinatedEnv::step_batch(const Batch& states, const Batch& actions, std::span<RolloutStreams> streams,
                                  int) const
{
    const Eigen::Index n = states.rows();
    const int d = state_dim();
    if (static_cast<Eigen::Index>(streams.size()) != n)
        throw std::invalid_argument("hallucinated env: one stream per row required");
    Batch z(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j)
            z(i, j) = streams[static_cast<std::size_t>(i)].main.normal();

    Batch next;
    switch (setup_.mode) {
    case StepMode::CA: {
        const mdp::ModelPrediction pred = setup_.model->predict(states, actions);
        next = shifted_mean(setup_, pred, states, actions) + pred.aleatoric_var.cwiseSqrt().cwiseProduct(z);
        break;
    }
    case StepMode::DS: {
        const mdp::ModelPrediction pred = setup_.model->predict(states, actions);
        next = pred.mean + (pred.epistemic_std.cwiseAbs2() + pred.aleatoric_var).cwiseSqrt().cwiseProduct(z);
        break;
    }
    case StepMode::Member: {
        Eigen::MatrixXd mean, var;
        setup_.ensemble->member_predict(setup_.member, states, actions, mean, var);
        next = mean + var.cwiseSqrt().cwiseProduct(z);
        break;
    }
    case StepMode::TS1:
    case StepMode::DA1: {
        const bnn::PredictiveMixture mix = setup_.ensemble->mixture(states, actions);
        const int K = setup_.ensemble->size();
        Batch probs;
        if (setup_.mode == StepMode::DA1)
            probs = setup_.discrete->probabilities(states, actions);
        next.resize(n, d);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double u = streams[static_cast<std::size_t>(i)].aux.uniform();
            int k = 0;
            if (setup_.mode == StepMode::TS1) {
                k = std::min(K - 1, static_cast<int>(u * K));
            } else {
                double c = 0.0;
                k = K - 1;
                for (int m = 0; m < K; ++m) {
                    c += probs(i, m);
                    if (u < c) {
                        k = m;
                        break;
                    }
                }
            }
            const auto kk = static_cast<std::size_t>(k);
            next.row(i) = mix.member_mean[kk].row(i) +
                          mix.member_var[kk].row(i).cwiseSqrt().cwiseProduct(z.row(i));
        }
        break;
    }
    }
    task_.topology.canonicalize(next);
    return next;
}

std::shared_ptr<const HallucinatedEnv> make_gp_hallucinated_env(std::shared_ptr<const mdp::StatisticalModel> gp_model,
                                                                std::shared_ptr<const ContinuousAdversary> adversary,
                                                                const mdp::Environment& env_spec)
{
    HallucinatedEnv::Setup s;
    s.mode = StepMode::CA;
    s.model = std::move(gp_model);
    s.continuous = std::move(adversary);
    return std::make_shared<const HallucinatedEnv>(env_spec.task(), std::move(s));
}

std::shared_ptr<const HallucinatedEnv> make_ensemble_hallucinated_env(std::shared_ptr<const bnn::Ensemble> ensemble,
                                                                      StepMode mode, const mdp::Environment& env_spec,
                                                                      std::shared_ptr<const ContinuousAdversary> continuous,
                                                                      std::shared_ptr<const DiscreteAdversary> discrete,
                                                                      int member)
{
    if (!ensemble)
        throw std::invalid_argument("make_ensemble_hallucinated_env: null ensemble");
    if (mode == StepMode::DA1 && !discrete)
        throw std::invalid_argument("make_ensemble_hallucinated_env: DA1 needs a discrete adversary");
    if (mode != StepMode::CA && continuous)
        throw std::invalid_argument("make_ensemble_hallucinated_env: continuous adversary only applies to CA");
    HallucinatedEnv::Setup s;
    s.mode = mode;
    s.model = ensemble;
    s.ensemble = std::move(ensemble);
    s.continuous = std::move(continuous);
    s.discrete = std::move(discrete);
    s.member = member;
    return std::make_shared<const HallucinatedEnv>(env_spec.task(), std::move(s));
}

} // namespace cope::hambo
