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

#include "cope/envs/point_env.hpp"

#include <stdexcept>

namespace cope::envs {

void PointEnvSpec::validate() const
{
    if (!(action_bound > 0.0) || !(init_bound >= 0.0) || !(data_bound > 0.0) || !(sigma_eps >= 0.0))
        throw std::invalid_argument("point-env: invalid spec constants");
    if (horizon < 1)
        throw std::invalid_argument("point-env: horizon must be >= 1");
}

std::shared_ptr<const mdp::SimulatedEnvironment> make_point_env(const PointEnvSpec& spec)
{
    spec.validate();
    mdp::Task task;
    task.name = "point-env";
    task.state_dim = 2;
    task.action_dim = 2;
    task.horizon = spec.horizon;
    task.action_box = Box::uniform(2, -spec.action_bound, spec.action_bound);
    task.reward = [](const StateVec& s, const ActionVec&) { return -s.norm(); };
    const double b = spec.init_bound;
    task.initial = [b](Rng& rng) {
        StateVec s(2);
        s[0] = rng.uniform(-b, b);
        s[1] = rng.uniform(-b, b);
        return s;
    };
    task.topology = mdp::StateTopology::euclidean(2);
    return std::make_shared<const mdp::SimulatedEnvironment>(
        std::move(task), [](const StateVec& s, const ActionVec& a) -> StateVec { return s + a; },
        Eigen::VectorXd::Constant(2, spec.sigma_eps));
}

Box point_env_data_box(const PointEnvSpec& spec)
{
    return Box::uniform(2, -spec.data_bound, spec.data_bound);
}

std::shared_ptr<const mdp::DeterministicPolicy> make_proportional_controller(double gain, const PointEnvSpec& spec)
{
    if (!(gain > 0.0))
        throw std::invalid_argument("proportional controller: gain must be > 0");
    return std::make_shared<const mdp::DeterministicPolicy>([gain](const StateVec& s) -> ActionVec { return -gain * s; },
                                                            Box::uniform(2, -spec.action_bound, spec.action_bound));
}

} // namespace cope::envs
