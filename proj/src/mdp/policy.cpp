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

#include "cope/mdp/policy.hpp"

#include <stdexcept>

namespace cope::mdp {

GaussianNoisePolicy::GaussianNoisePolicy(std::shared_ptr<const Policy> base, double noise_std, Box box)
    : base_(std::move(base)), noise_std_(noise_std), box_(std::move(box))
{
    if (!base_)
        throw std::invalid_argument("GaussianNoisePolicy: null base policy");
    if (!(noise_std_ >= 0.0))
        throw std::invalid_argument("GaussianNoisePolicy: noise std must be >= 0");
}

ActionVec GaussianNoisePolicy::act(const StateVec& s, Rng& rng) const
{
    ActionVec a = base_->act(s, rng);
    if (noise_std_ > 0.0)
        for (Eigen::Index j = 0; j < a.size(); ++j)
            a[j] += noise_std_ * rng.normal();
    return box_.clip(a);
}

} // namespace cope::mdp
