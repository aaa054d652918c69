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
#include "cope/hambo/hallucinated_env.hpp"
#include "cope/mdp/policy.hpp"
#include "cope/mdp/rollout.hpp"
#include "cope/opt/optimizer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cope::hambo {

enum class Estimator { HamboCA, HamboDA1, HamboDAinf, OpeDS, OpeTS1, OpeTSinf };

/// "hambo-ca", "hambo-da1", "hambo-dainf", "ope-ds", "ope-ts1", "ope-tsinf".
Estimator parse_estimator(const std::string& name);
std::string to_string(Estimator e);
bool needs_ensemble(Estimator e);

struct EstimatorConfig {
    /// Bounds are filled in per estimator from the adversary spec.
    opt::OptimizerConfig opt;
    std::size_t rollouts_per_candidate = 16;
    /// Rollouts of the final evaluation.
    std::size_t L = 10000;
    /// Stream key of the final evaluation; the true-env reference uses the same key.
    std::uint64_t eval_seed = 0;
    AdversarySpec adversary;
    DiscreteAdversarySpec discrete;
    /// DAinf: take the ceil(delta K)-th smallest member value when K > 20.
    std::optional<double> dainf_quantile;
};

struct AdversarySummary {
    std::string optimizer;
    int iterations = 0;
    int evaluations = 0;
    int failed_evaluations = 0;
    double best_objective = 0.0;
    double null_objective = 0.0;
    std::vector<double> incumbent_trace;
    /// The optimizer failed and the null adversary was used.
    bool fallback = false;
    /// The final evaluation kept the null adversary.
    bool null_selected = false;
    /// Parameters of the adversary kept by the final evaluation.
    Eigen::VectorXd best_params;
};

struct CopeReport {
    std::string estimator;
    /// mc.mean of the final evaluation.
    double J_tilde = 0.0;
    mdp::ReturnEstimate mc;
    /// Null adversary (eta = 0, or uniform member choice) on the final seeds.
    std::optional<mdp::ReturnEstimate> neutral;
    AdversarySummary adversary;
    /// DAinf / TSinf per-member values on the final seeds.
    std::vector<double> member_values;
    std::string config_digest;
    std::uint64_t seed = 0;
};

/// J~ = min over optimized eta of J under the hallucinated model (GP or ensemble CA).
CopeReport estimate_hambo_ca(const mdp::Environment& env, const mdp::Policy& policy,
                             std::shared_ptr<const mdp::StatisticalModel> model, const EstimatorConfig& cfg);

/// J~ = min over per-step member selectors of the mixture return. The K
/// constant-member selectors are always among the finalists, so J~_DA1 never
/// exceeds J~_DAinf on shared seeds.
CopeReport estimate_hambo_da1(const mdp::Environment& env, const mdp::Policy& policy,
                              std::shared_ptr<const bnn::Ensemble> ensemble, const EstimatorConfig& cfg);

/// J~ = min_k J under member k (or an order statistic, see EstimatorConfig::dainf_quantile).
CopeReport estimate_hambo_dainf(const mdp::Environment& env, const mdp::Policy& policy,
                                std::shared_ptr<const bnn::Ensemble> ensemble, const EstimatorConfig& cfg);

/// Neutral model-based estimates. DS works with any model; TS1/TSinf need the ensemble.
CopeReport estimate_neutral(const mdp::Environment& env, const mdp::Policy& policy,
                            std::shared_ptr<const mdp::StatisticalModel> model,
                            std::shared_ptr<const bnn::Ensemble> ensemble, Estimator mode, const EstimatorConfig& cfg);

/// Runs any estimator; `ensemble` may be null for GP models.
CopeReport run_estimator(Estimator e, const mdp::Environment& env, const mdp::Policy& policy,
                         std::shared_ptr<const mdp::StatisticalModel> model,
                         std::shared_ptr<const bnn::Ensemble> ensemble, const EstimatorConfig& cfg);

struct GapBoundInputs {
    double L_r = 0.0;
    double L_pi = 0.0;
    double L_f = 0.0;
    double L_sigma = 0.0;
    int d_s = 1;
    double beta = 0.0;
    int T = 1;
    double expected_sigma_norm = 0.0;
};

struct GapBound {
    double C_n = 0.0;
    /// C_n * E||sigma||.
    double value = 0.0;
    /// Overflowed to +inf.
    bool vacuous = false;
};

/// C_n = Lr (1 + sqrt d_s) beta T^2 (1 + Lf + (1 + sqrt d_s) beta Lsigma)^(T-1) with
/// Lx = L_x (1 + L_pi); the bound on J - J~ is C_n E||sigma||.
GapBound gap_bound(const GapBoundInputs& in);

} // namespace cope::hambo
