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

#include "cope/harness/registry.hpp"

#include "cope/envs/pendulum.hpp"
#include "cope/envs/point_env.hpp"
#include "cope/envs/point_safety.hpp"

namespace cope::harness {

EnvBundle make_env_bundle(const Json& config)
{
    return make_env_bundle(config, config.at("env").at("horizon").get<int>());
}

EnvBundle make_env_bundle(const Json& config, int horizon)
{
    const Json& e = config.at("env");
    const Json& p = config.at("policy");
    const Json& b = config.at("data").at("behavior");
    EnvBundle out;
    out.name = e.at("name").get<std::string>();
    if (out.name == "point-safety") {
        envs::PointSafetySpec spec;
        spec.horizon = horizon;
        spec.danger_penalty = e.at("danger_penalty");
        spec.danger_radius = e.at("danger_radius");
        spec.action_bound = e.at("action_bound");
        spec.sigma_eps = e.at("sigma_eps");
        out.env = envs::make_point_safety(spec);
        out.policy = envs::make_intermediate_goal_policy(p.at("y"), spec);
        out.behavior = envs::make_intermediate_goal_policy(b.at("y"), spec);
        out.data_box = Box::uniform(2, -3.0, 3.0);
    } else if (out.name == "point-env") {
        envs::PointEnvSpec spec;
        spec.horizon = horizon;
        spec.sigma_eps = e.at("sigma_eps");
        spec.action_bound = e.at("action_bound");
        spec.init_bound = e.at("init_bound");
        spec.data_bound = e.at("data_bound");
        out.env = envs::make_point_env(spec);
        out.policy = envs::make_proportional_controller(p.at("gain"), spec);
        out.behavior = envs::make_proportional_controller(b.at("gain"), spec);
        out.data_box = envs::point_env_data_box(spec);
    } else if (out.name == "pendulum") {
        envs::PendulumSpec spec;
        spec.horizon = horizon;
        spec.sigma_eps = e.at("sigma_eps");
        spec.g = e.at("g");
        spec.m = e.at("m");
        spec.l = e.at("l");
        spec.dt = e.at("dt");
        spec.max_speed = e.at("max_speed");
        spec.max_torque = e.at("max_torque");
        spec.init_speed = e.at("init_speed");
        envs::PendulumControllerGains k;
        k.pump = p.at("pump");
        k.kp = p.at("kp");
        k.kd = p.at("kd");
        k.capture_angle = p.at("capture_angle");
        out.env = envs::make_pendulum(spec);
        out.policy = envs::make_pendulum_controller(spec, k);
        out.behavior = out.policy;
        out.data_box = envs::pendulum_data_box(spec);
    } else {
        throw ConfigError("unknown environment '" + out.name + "'");
    }
    return out;
}

} // namespace cope::harness
