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
#include "cope/mdp/policy.hpp"

#include <memory>

namespace cope::envs {

/// Planar navigation from `start` to `goal` around a circular danger zone at the origin.
struct PointSafetySpec {
    Eigen::Vector2d start{-2.0, 0.0};
    Eigen::Vector2d goal{2.0, 0.0};
    double danger_radius = 1.0;
    double action_bound = 0.5;
    int horizon = 16;
    double danger_penalty = -100.0;
    double sigma_eps = 0.01;

    void validate() const;
};

/// s' = s + a + eps, r(s, a) = -||s - goal|| + penalty * 1{||s|| <= radius}, s_0 = start.
std::shared_ptr<const mdp::SimulatedEnvironment> make_point_safety(const PointSafetySpec& spec = {});

/// True iff ||s|| <= danger_radius.
bool in_danger(const PointSafetySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& s);

/// Heads to (0, y) while s_x < 0, then to the goal. The action is the residual
/// (target - s), scaled down uniformly so it fits in the action box; the path
/// is a pair of straight segments.
class IntermediateGoalPolicy final : public mdp::Policy {
public:
    IntermediateGoalPolicy(double y, PointSafetySpec spec);

    ActionVec act(const StateVec& s, Rng&) const override { return (*this)(s); }
    ActionVec operator()(const StateVec& s) const;
    bool deterministic() const override { return true; }

    double y() const { return y_; }
    /// Label from the tangency geometry of the default spec; never used by the dynamics.
    bool labeled_unsafe() const;

private:
    double y_;
    PointSafetySpec spec_;
};

/// |y| below which the straight path from the start to (0, y) touches the unit circle.
inline constexpr double kUnsafeGoalThreshold = 1.155;

std::shared_ptr<const mdp::Policy> make_intermediate_goal_policy(double y, const PointSafetySpec& spec = {});

} // namespace cope::envs
