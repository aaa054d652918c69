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

#include "cope/mdp/dataset.hpp"
#include "cope/mdp/environment.hpp"
#include "cope/mdp/policy.hpp"

#include <string>

namespace cope::mdp {

/// What a dynamics model regresses: the next state itself, or the
/// (topology-aware) difference s' - s.
enum class TargetMode { NextState, Delta };

TargetMode parse_target_mode(const std::string& name);
std::string to_string(TargetMode mode);

/// Regression targets for `data` under `mode`.
Batch make_targets(const Dataset& data, TargetMode mode, const StateTopology& topology);

/// Batched output of a calibrated statistical model, one row per query.
struct ModelPrediction {
    Batch mean;          // predicted next state, before canonicalization
    Batch epistemic_std; // sigma_n (GP) or sigma_{Theta,e} (ensemble)
    Batch aleatoric_var; // sigma_eps^2 (GP) or sigma^2_{Theta,a} (ensemble)
};

/// The (mu_n, sigma_n, beta_n) triple: a mean transition model, its epistemic
/// standard deviation and the per-dimension width of the confidence cube in
/// units of sigma.
class StatisticalModel {
public:
    virtual ~StatisticalModel() = default;

    virtual int state_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual ModelPrediction predict(const Batch& states, const Batch& actions) const = 0;
    /// beta_n for GP models, calib_tau for ensembles.
    virtual Eigen::VectorXd confidence_scale() const = 0;
};

/// Monte Carlo estimate of E_{(s,a) ~ rho^pi}[ ||sigma_n(s,a)|| ] from L rollouts
/// of `policy` in the true environment. Pairs (s_t, a_t) for t = 0..T-1 are
/// weighted equally; the terminal state is excluded.
double estimate_expected_uncertainty(const StatisticalModel& model, const Environment& env, const Policy& policy,
                                     std::size_t L, std::uint64_t seed);

} // namespace cope::mdp
