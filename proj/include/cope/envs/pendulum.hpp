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

/// Torque-limited pendulum with state (theta, theta_dot), theta = 0 upright.
struct PendulumSpec {
    double g = 10.0;
    double m = 1.0;
    double l = 1.0;
    double dt = 0.05;
    double max_speed = 8.0;
    double max_torque = 2.0;
    int horizon = 200;
    double sigma_eps = 0.01;
    /// Initial distribution: theta ~ U(-pi, pi), theta_dot ~ U(-init_speed, init_speed).
    double init_speed = 1.0;

    void validate() const;
};

/// One noiseless integration step: theta_dot is updated first and clipped,
/// then theta advances with the new velocity; theta is wrapped to (-pi, pi].
Eigen::Vector2d pendulum_mean_step(const PendulumSpec& spec, const Eigen::Vector2d& s, double u);

/// Total mechanical energy of the rigid rod, zero at the horizontal.
double pendulum_energy(const PendulumSpec& spec, const Eigen::Vector2d& s);

std::shared_ptr<const mdp::SimulatedEnvironment> make_pendulum(const PendulumSpec& spec = {});

Box pendulum_data_box(const PendulumSpec& spec = {});

/// Energy-pumping swing-up with a PD stabilizer near the upright position.
struct PendulumControllerGains {
    double pump = 2.0;
    double kp = 10.0;
    double kd = 2.0;
    /// Switch to PD when |theta| < capture_angle.
    double capture_angle = 0.5;
};

std::shared_ptr<const mdp::DeterministicPolicy> make_pendulum_controller(const PendulumSpec& spec = {},
                                                                         const PendulumControllerGains& gains = {});

} // namespace cope::envs
