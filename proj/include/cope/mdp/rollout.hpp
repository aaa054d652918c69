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

#include <cstdint>
#include <vector>

namespace cope::mdp {

struct Trajectory {
    std::vector<StateVec> states;   // T + 1
    std::vector<ActionVec> actions; // T
    std::vector<double> rewards;    // T

    int length() const { return static_cast<int>(actions.size()); }
    /// Undiscounted return.
    double total_return() const;
};

struct ReturnEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t num_rollouts = 0;
};

/// Mean and standard error (sample std / sqrt(L)) of a list of returns.
ReturnEstimate summarize_returns(const std::vector<double>& returns);

/// One episode of exactly env.horizon() steps. Throws RolloutFault on a
/// non-finite state.
Trajectory rollout(const Environment& env, const Policy& policy, RolloutStreams& streams);

/// L episodes stepped in lockstep. Rollout l draws from RolloutStreams::for_rollout(seed, l),
/// so results do not depend on batching or thread count.
std::vector<Trajectory> rollouts(const Environment& env, const Policy& policy, std::size_t L, std::uint64_t seed);

/// Returns of L lockstep episodes, without keeping the trajectories.
std::vector<double> rollout_returns(const Environment& env, const Policy& policy, std::size_t L, std::uint64_t seed);

/// Monte Carlo estimate of J(pi) from L lockstep rollouts (OpenMP over rollouts).
ReturnEstimate mc_return_estimate(const Environment& env, const Policy& policy, std::size_t L, std::uint64_t seed);

/// Serial reference for mc_return_estimate: one rollout() at a time.
ReturnEstimate mc_return_estimate_serial(const Environment& env, const Policy& policy, std::size_t L,
                                         std::uint64_t seed);

/// Affine map with normalize_return(true_return, true_return) == 1 that
/// preserves ordering for negative returns.
double normalize_return(double value, double true_return);

} // namespace cope::mdp
