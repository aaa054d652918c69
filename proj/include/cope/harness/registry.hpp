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

#include "cope/harness/config.hpp"
#include "cope/mdp/environment.hpp"
#include "cope/mdp/policy.hpp"

#include <memory>

namespace cope::harness {

/// A true environment with the policies and sampling boxes an experiment needs.
struct EnvBundle {
    std::string name;
    std::shared_ptr<const mdp::SimulatedEnvironment> env;
    /// Evaluation policy pi_e.
    std::shared_ptr<const mdp::Policy> policy;
    /// Noise-free behavior policy; action noise is added by the dataset generator.
    std::shared_ptr<const mdp::Policy> behavior;
    /// State box for uniform datasets.
    Box data_box;
};

/// Builds from the resolved config's "env", "policy" and "data.behavior" sections.
EnvBundle make_env_bundle(const Json& config);

/// Same with the horizon replaced.
EnvBundle make_env_bundle(const Json& config, int horizon);

} // namespace cope::harness
