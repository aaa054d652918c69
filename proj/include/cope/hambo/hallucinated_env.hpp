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

#include "cope/bnn/ensemble.hpp"
#include "cope/hambo/adversary.hpp"
#include "cope/mdp/environment.hpp"
#include "cope/mdp/model.hpp"

#include <memory>
#include <string>

namespace cope::hambo {

/// How a model-based environment samples the next state.
enum class StepMode {
    /// mean + scale * eta * sigma_e + N(0, aleatoric): the hallucinated transition.
    CA,
    /// N(mean, sigma_e^2 + aleatoric): moment-matched Gaussian.
    DS,
    /// A member drawn uniformly at every step.
    TS1,
    /// A member drawn from the discrete adversary at every step.
    DA1,
    /// One fixed member.
    Member,
};

std::string to_string(StepMode mode);

/// Environment whose transitions come from a statistical model. Reward,
/// initial distribution, horizon and topology are those of the evaluated
/// environment. Transition noise is drawn from each rollout's main stream
/// (exactly d_s normals per step in every mode) and member choices from its
/// aux stream, so rollouts under different modes share their noise.
class HallucinatedEnv final : public mdp::Environment {
public:
    struct Setup {
        StepMode mode = StepMode::CA;
        std::shared_ptr<const mdp::StatisticalModel> model;
        /// Required for TS1, DA1 and Member.
        std::shared_ptr<const bnn::Ensemble> ensemble;
        /// CA; null means eta = 0.
        std::shared_ptr<const ContinuousAdversary> continuous;
        /// DA1.
        std::shared_ptr<const DiscreteAdversary> discrete;
        int member = 0;
    };

    HallucinatedEnv(const mdp::Task& task, Setup setup);

    const Setup& setup() const { return setup_; }

    Batch step_batch(const Batch& states, const Batch& actions, std::span<RolloutStreams> streams,
                     int t) const override;

    /// CA only: mean + scale * eta * sigma_e for a batch, without noise.
    Batch hallucinated_mean(const Batch& states, const Batch& actions) const;

private:
    Setup setup_;
};

std::shared_ptr<const HallucinatedEnv> make_gp_hallucinated_env(std::shared_ptr<const mdp::StatisticalModel> gp_model,
                                                                std::shared_ptr<const ContinuousAdversary> adversary,
                                                                const mdp::Environment& env_spec);

/// mode CA uses `continuous`, DA1 uses `discrete`, Member uses `member`.
std::shared_ptr<const HallucinatedEnv> make_ensemble_hallucinated_env(std::shared_ptr<const bnn::Ensemble> ensemble,
                                                                      StepMode mode, const mdp::Environment& env_spec,
                                                                      std::shared_ptr<const ContinuousAdversary> continuous = nullptr,
                                                                      std::shared_ptr<const DiscreteAdversary> discrete = nullptr,
                                                                      int member = 0);

} // namespace cope::hambo
