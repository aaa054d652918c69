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

#include "cope/envs/point_safety.hpp"

#include <cmath>
#include <stdexcept>

namespace cope::envs {

void PointSafetySpec::validate() const
{
    if (!(danger_radius > 0.0))
        throw std::invalid_argument("point-safety: danger_radius must be > 0");
    if (!(danger_penalty < 0.0))
        throw std::invalid_argument("point-safety: danger_penalty must be < 0");
    if (!(action_bound > 0.0) || !(sigma_eps >= 0.0))
        throw std::invalid_argument("point-safety: invalid action bound or noise");
    const double path = (goal - start).norm();
    if (horizon * action_bound < path)
        throw std::invalid_argument("point-safety: horizon too short to reach the goal");
}

bool in_danger(const PointSafetySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& s)
{
    return s.norm() <= spec.danger_radius;
}

std::shared_ptr<const mdp::SimulatedEnvironment> make_point_safety(const PointSafetySpec& spec)
{
    spec.validate();
    mdp::Task task;
    task.name = "point-safety";
    task.state_dim = 2;
    task.action_dim = 2;
    task.horizon = spec.horizon;
    task.action_box = Box::uniform(2, -spec.action_bound, spec.action_bound);
    task.reward = [spec](const StateVec& s, const ActionVec&) {
        double r = -(s - spec.goal).norm();
        if (in_danger(spec, s))
            r += spec.danger_penalty;
        return r;
    };
    const Eigen::VectorXd start = spec.start;
    task.initial = [start](Rng&) { return start; };
    task.topology = mdp::StateTopology::euclidean(2);
    return std::make_shared<const mdp::SimulatedEnvironment>(
        std::move(task), [](const StateVec& s, const ActionVec& a) -> StateVec { return s + a; },
        Eigen::VectorXd::Constant(2, spec.sigma_eps));
}

IntermediateGoalPolicy::IntermediateGoalPolicy(double y, PointSafetySpec spec) : y_(y), spec_(std::move(spec)) {}

ActionVec IntermediateGoalPolicy::operator()(const StateVec& s) const
{
    const Eigen::Vector2d target = s[0] < 0.0 ? Eigen::Vector2d(0.0, y_) : spec_.goal;
    Eigen::Vector2d d = target - Eigen::Vector2d(s[0], s[1]);
    const double m = d.cwiseAbs().maxCoeff();
    if (m > spec_.action_bound)
        d *= spec_.action_bound / m;
    return d;
}

bool IntermediateGoalPolicy::labeled_unsafe() const
{
    return std::abs(y_) <= kUnsafeGoalThreshold;
}

std::shared_ptr<const mdp::Policy> make_intermediate_goal_policy(double y, const PointSafetySpec& spec)
{
    return std::make_shared<const IntermediateGoalPolicy>(y, spec);
}

} // namespace cope::envs
