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

#include "cope/mdp/model.hpp"

#include "cope/mdp/rollout.hpp"

#include <stdexcept>

namespace cope::mdp {

TargetMode parse_target_mode(const std::string& name)
{
    if (name == "next_state")
        return TargetMode::NextState;
    if (name == "delta")
        return TargetMode::Delta;
    throw std::invalid_argument("unknown target mode '" + name + "' (expected next_state or delta)");
}

std::string to_string(TargetMode mode)
{
    return mode == TargetMode::NextState ? "next_state" : "delta";
}

Batch make_targets(const Dataset& data, TargetMode mode, const StateTopology& topology)
{
    if (mode == TargetMode::NextState)
        return data.next_states();
    return topology.difference(data.next_states(), data.states());
}

double estimate_expected_uncertainty(const StatisticalModel& model, const Environment& env, const Policy& policy,
                                     std::size_t L, std::uint64_t seed)
{
    if (L == 0)
        throw std::invalid_argument("estimate_expected_uncertainty: L must be >= 1");
    const std::vector<Trajectory> trajs = rollouts(env, policy, L, seed);
    const int T = env.horizon();
    const Eigen::Index rows = static_cast<Eigen::Index>(L) * T;
    Batch S(rows, env.state_dim());
    Batch A(rows, env.action_dim());
    Eigen::Index r = 0;
    for (const auto& tr : trajs)
        for (int t = 0; t < T; ++t, ++r) {
            S.row(r) = tr.states[static_cast<std::size_t>(t)].transpose();
            A.row(r) = tr.actions[static_cast<std::size_t>(t)].transpose();
        }
    const ModelPrediction p = model.predict(S, A);
    return p.epistemic_std.rowwise().norm().mean();
}

} // namespace cope::mdp
