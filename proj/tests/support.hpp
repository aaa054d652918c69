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

#include "cope/mdp/environment.hpp"
#include "cope/mdp/model.hpp"
#include "cope/mdp/policy.hpp"

#include <Eigen/Dense>

#include <memory>

namespace cope::testing {

/// s' = A s + B a + noise, r = -||s||^2, s0 ~ U[-1, 1]^d.
inline std::shared_ptr<const mdp::SimulatedEnvironment> linear_env(int d, int T, double noise, double a = 0.9,
                                                                   double b = 0.5)
{
    mdp::Task task;
    task.name = "linear";
    task.state_dim = d;
    task.action_dim = d;
    task.horizon = T;
    task.action_box = Box::uniform(d, -1.0, 1.0);
    task.reward = [](const StateVec& s, const ActionVec&) { return -s.squaredNorm(); };
    task.initial = [d](Rng& rng) {
        StateVec s(d);
        for (int i = 0; i < d; ++i)
            s[i] = rng.uniform(-1.0, 1.0);
        return s;
    };
    task.topology = mdp::StateTopology::euclidean(d);
    return std::make_shared<const mdp::SimulatedEnvironment>(
        std::move(task), [a, b](const StateVec& s, const ActionVec& u) -> StateVec { return a * s + b * u; },
        Eigen::VectorXd::Constant(d, noise));
}

inline std::shared_ptr<const mdp::DeterministicPolicy> linear_policy(int d, double k)
{
    return std::make_shared<const mdp::DeterministicPolicy>([k](const StateVec& s) -> ActionVec { return -k * s; },
                                                            Box::uniform(d, -1.0, 1.0));
}

/// Model with a known mean map and constant epistemic std; used to pin down
/// the hallucinated dynamics exactly.
class StubModel final : public mdp::StatisticalModel {
public:
    StubModel(int d_s, int d_a, double a, double b, Eigen::VectorXd sigma, Eigen::VectorXd scale, double aleatoric)
        : d_s_(d_s), d_a_(d_a), a_(a), b_(b), sigma_(std::move(sigma)), scale_(std::move(scale)), ale_(aleatoric)
    {
    }

    int state_dim() const override { return d_s_; }
    int action_dim() const override { return d_a_; }
    mdp::ModelPrediction predict(const Batch& S, const Batch& A) const override
    {
        mdp::ModelPrediction p;
        p.mean = a_ * S + b_ * A;
        p.epistemic_std = sigma_.transpose().replicate(S.rows(), 1);
        p.aleatoric_var = Eigen::MatrixXd::Constant(S.rows(), d_s_, ale_);
        return p;
    }
    Eigen::VectorXd confidence_scale() const override { return scale_; }

private:
    int d_s_, d_a_;
    double a_, b_;
    Eigen::VectorXd sigma_, scale_;
    double ale_;
};

} // namespace cope::testing
