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

/// s' = s + a + eps on R^2, r = -||s||, s_0 ~ U([-init, init]^2), a in [-1, 1]^2.
struct PointEnvSpec {
    double action_bound = 1.0;
    double init_bound = 10.0;
    int horizon = 20;
    double sigma_eps = 0.01;
    /// State box for uniform offline data.
    double data_bound = 40.0;

    void validate() const;
};

std::shared_ptr<const mdp::SimulatedEnvironment> make_point_env(const PointEnvSpec& spec = {});

Box point_env_data_box(const PointEnvSpec& spec = {});

/// a = clip(-gain * s, box).
std::shared_ptr<const mdp::DeterministicPolicy> make_proportional_controller(double gain,
                                                                             const PointEnvSpec& spec = {});

} // namespace cope::envs
