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

#include "cope/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cope::envs {

void PendulumSpec::validate() const
{
    if (!(g > 0.0 && m > 0.0 && l > 0.0 && dt > 0.0 && max_speed > 0.0 && max_torque > 0.0))
        throw std::invalid_argument("pendulum: physical constants must be positive");
    if (horizon < 1 || !(sigma_eps >= 0.0) || !(init_speed >= 0.0))
        throw std::invalid_argument("pendulum: invalid horizon, noise or initial speed");
}

Eigen::Vector2d pendulum_mean_step(const PendulumSpec& p, const Eigen::Vector2d& s, double u)
{
    const double acc = 3.0 * p.g / (2.0 * p.l) * std::sin(s[0]) + 3.0 / (p.m * p.l * p.l) * u;
    const double w = std::clamp(s[1] + acc * p.dt, -p.max_speed, p.max_speed);
    return {mdp::wrap_angle(s[0] + w * p.dt), w};
}

double pendulum_energy(const PendulumSpec& p, const Eigen::Vector2d& s)
{
    const double inertia = p.m * p.l * p.l / 3.0;
    return 0.5 * inertia * s[1] * s[1] + p.m * p.g * 0.5 * p.l * std::cos(s[0]);
}

std::shared_ptr<const mdp::SimulatedEnvironment> make_pendulum(const PendulumSpec& spec)
{
    spec.validate();
    mdp::Task task;
    task.name = "pendulum";
    task.state_dim = 2;
    task.action_dim = 1;
    task.horizon = spec.horizon;
    task.action_box = Box::uniform(1, -spec.max_torque, spec.max_torque);
    task.reward = [](const StateVec& s, const ActionVec& a) {
        const double th = mdp::wrap_angle(s[0]);
        return -(th * th + 0.1 * s[1] * s[1] + 0.001 * a[0] * a[0]);
    };
    const double w0 = spec.init_speed;
    task.initial = [w0](Rng& rng) {
        StateVec s(2);
        s[0] = rng.uniform(-std::numbers::pi, std::numbers::pi);
        s[1] = rng.uniform(-w0, w0);
        return s;
    };
    task.topology = mdp::StateTopology{{true, false},
                                       Eigen::Vector2d(-std::numeric_limits<double>::infinity(), -spec.max_speed),
                                       Eigen::Vector2d(std::numeric_limits<double>::infinity(), spec.max_speed)};
    return std::make_shared<const mdp::SimulatedEnvironment>(
        std::move(task),
        [spec](const StateVec& s, const ActionVec& a) -> StateVec {
            return pendulum_mean_step(spec, Eigen::Vector2d(s[0], s[1]), a[0]);
        },
        Eigen::VectorXd::Constant(2, spec.sigma_eps));
}

Box pendulum_data_box(const PendulumSpec& spec)
{
    return Box{Eigen::Vector2d(-std::numbers::pi, -spec.max_speed), Eigen::Vector2d(std::numbers::pi, spec.max_speed)};
}

std::shared_ptr<const mdp::DeterministicPolicy> make_pendulum_controller(const PendulumSpec& spec,
                                                                         const PendulumControllerGains& k)
{
    const double top = spec.m * spec.g * 0.5 * spec.l;
    return std::make_shared<const mdp::DeterministicPolicy>(
        [spec, k, top](const StateVec& s) -> ActionVec {
            const double th = mdp::wrap_angle(s[0]);
            const double w = s[1];
            double u;
            if (std::abs(th) < k.capture_angle) {
                u = -k.kp * th - k.kd * w;
            } else {
                const double e = pendulum_energy(spec, Eigen::Vector2d(th, w));
                u = k.pump * (top - e) * (w >= 0.0 ? 1.0 : -1.0);
            }
            return ActionVec::Constant(1, u);
        },
        Box::uniform(1, -spec.max_torque, spec.max_torque));
}

} // namespace cope::envs
