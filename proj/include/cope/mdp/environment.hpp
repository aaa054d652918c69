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
#include "cope/common/types.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cope::mdp {

/// Shape of the state space: angular coordinates wrapped to (-pi, pi] and
/// optional per-dimension clipping (e.g. a velocity limit).
struct StateTopology {
    std::vector<bool> periodic;
    Eigen::VectorXd clip_lo;
    Eigen::VectorXd clip_hi;

    static StateTopology euclidean(int dim);

    bool has_periodic() const;
    /// Maps every row of `states` into the canonical state space.
    void canonicalize(Batch& states) const;
    void canonicalize(StateVec& s) const;
    /// next - prev, taking the short way around periodic coordinates.
    Batch difference(const Batch& next, const Batch& prev) const;
};

double wrap_angle(double x);

using RewardFn = std::function<double(const StateVec&, const ActionVec&)>;
using InitialFn = std::function<StateVec(Rng&)>;
using DynamicsFn = std::function<StateVec(const StateVec&, const ActionVec&)>;

/// Everything about an MDP except its transition model: dimensions, horizon,
/// action box, the known reward and the initial distribution.
struct Task {
    std::string name;
    int state_dim = 0;
    int action_dim = 0;
    int horizon = 1;
    Box action_box;
    RewardFn reward;
    InitialFn initial;
    StateTopology topology;

    void validate() const;
};

/// Finite-horizon MDP. Implementations must be immutable after construction;
/// all randomness comes in through the rollout streams.
class Environment {
public:
    explicit Environment(Task task);
    virtual ~Environment() = default;

    const Task& task() const { return task_; }
    const std::string& name() const { return task_.name; }
    int state_dim() const { return task_.state_dim; }
    int action_dim() const { return task_.action_dim; }
    int horizon() const { return task_.horizon; }
    const Box& action_box() const { return task_.action_box; }

    double reward(const StateVec& s, const ActionVec& a) const { return task_.reward(s, a); }
    StateVec sample_initial(Rng& rng) const { return task_.initial(rng); }

    /// Advances a batch of rollouts by one step. Row i of `states`/`actions`
    /// consumes randomness from `streams[i]` only; `t` is the time index of the
    /// current state.
    virtual Batch step_batch(const Batch& states, const Batch& actions, std::span<RolloutStreams> streams,
                             int t) const = 0;

    StateVec step(const StateVec& s, const ActionVec& a, RolloutStreams& streams, int t) const;

protected:
    Task task_;
};

/// The ground-truth simulator: s' = f(s, a) + eps with independent Gaussian noise.
class SimulatedEnvironment final : public Environment {
public:
    SimulatedEnvironment(Task task, DynamicsFn mean_dynamics, Eigen::VectorXd noise_std);

    StateVec mean_dynamics(const StateVec& s, const ActionVec& a) const;
    const Eigen::VectorXd& noise_std() const { return noise_std_; }
    /// Log-density of the transition noise.
    double noise_log_density(const Eigen::VectorXd& eps) const;

    Batch step_batch(const Batch& states, const Batch& actions, std::span<RolloutStreams> streams,
                     int t) const override;

private:
    DynamicsFn mean_dynamics_;
    Eigen::VectorXd noise_std_;
};

} // namespace cope::mdp
