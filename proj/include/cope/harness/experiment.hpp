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
#include "cope/gp/gp_model.hpp"
#include "cope/hambo/estimators.hpp"
#include "cope/harness/config.hpp"
#include "cope/harness/registry.hpp"
#include "cope/mdp/dataset.hpp"

#include <filesystem>
#include <functional>
#include <optional>

namespace cope::harness {

using Logger = std::function<void(const std::string&)>;

struct Timing {
    double fit_seconds = 0.0;
    double estimate_seconds = 0.0;
    double true_seconds = 0.0;
};

/// One (estimator, seed, sweep value) row.
struct ResultsRecord {
    std::string env;
    std::string estimator;
    std::string model;
    std::uint64_t seed = 0;
    std::string sweep_axis = "none";
    std::optional<std::size_t> sweep_value;
    std::size_t n = 0;
    int horizon = 0;
    std::string config_digest;

    /// Empty when the row failed; `error` says why.
    std::optional<hambo::CopeReport> report;
    std::string error;

    mdp::ReturnEstimate J_true;
    double J_tilde_normalized = 0.0;
    /// normalize_return(J_true, J_true), exactly 1.
    double J_true_normalized = 1.0;
    std::optional<double> neutral_normalized;
    /// J~ <= J_true + 2 SE(J_true).
    bool lower_bound_holds = false;

    /// Model diagnostics (beta, gamma, calib_tau, training epochs).
    Json model_info = Json::object();
    /// Toy demo: "safe" or "unsafe" for the row's trajectory.
    std::optional<std::string> verdict;
    Timing timing;
};

Json to_json(const ResultsRecord& r);
Json to_json(const std::vector<ResultsRecord>& rows);

/// Writes `text` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& text);
void write_results(const std::filesystem::path& path, const std::vector<ResultsRecord>& rows);

/// Seeds derived from a row's root seed.
struct SeedPlan {
    std::uint64_t data;
    std::uint64_t model;
    std::uint64_t optimizer;
    std::uint64_t evaluation;

    static SeedPlan from_root(std::uint64_t root);
};

/// Loads data.path or generates a dataset from the config. `transitions`
/// overrides the size with a transition count (behavior mode rounds the
/// episode count up and truncates); the calibration tail is then set.
mdp::Dataset make_dataset(const Json& config, const EnvBundle& bundle, std::uint64_t data_seed,
                          std::optional<std::size_t> transitions = std::nullopt);

/// `cope gen-data`: uniform n transitions, or n behavior episodes.
mdp::Dataset generate_dataset(const std::string& env_name, const std::string& mode, std::size_t n,
                              std::uint64_t seed);

struct FittedModels {
    std::shared_ptr<const gp::GPModel> gp;
    std::shared_ptr<const bnn::Ensemble> ensemble;
    Json info = Json::object();
    double seconds = 0.0;
    std::string error;
};

gp::GPConfig gp_config(const Json& config, int state_dim, int action_dim);
bnn::SVGDConfig svgd_config(const Json& config, std::uint64_t seed);
hambo::EstimatorConfig estimator_config(const Json& config, const EnvBundle& bundle, const SeedPlan& seeds);

/// Fits what the config's estimators need. Fit errors are kept in `error`.
FittedModels fit_models(const Json& config, const EnvBundle& bundle, const mdp::Dataset& data, std::uint64_t seed);

/// One block: every estimator for one seed and one (n, T).
std::vector<ResultsRecord> evaluate_block(const Json& config, const EnvBundle& bundle, const FittedModels& models,
                                          std::uint64_t seed, std::size_t n, const std::string& axis,
                                          std::optional<std::size_t> value, const Logger& log = {});

/// `cope evaluate`: every estimator on every seed.
std::vector<ResultsRecord> run_evaluate(const Json& config, const Logger& log = {});

/// `cope sweep`: one evaluate block per sweep value. The n axis uses prefixes of
/// one master dataset per seed; the horizon axis shares dataset and model.
std::vector<ResultsRecord> run_sweep(const Json& config, const Logger& log = {});

/// One CSV row of a trajectory dump.
struct TrajectoryRow {
    int t = 0;
    double sx = 0.0;
    double sy = 0.0;
    double radius_x = 0.0;
    double radius_y = 0.0;
    std::string variant;
};

/// Header "t,sx,sy,radius_x,radius_y,variant".
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);
/// Throws std::runtime_error naming the line on malformed input.
std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text);

struct ToyDemoSeed {
    std::uint64_t seed = 0;
    bool adversarial_unsafe = false;
    bool neutral_unsafe = false;
    double adversarial_min_norm = 0.0;
    double neutral_min_norm = 0.0;
    std::vector<TrajectoryRow> trajectories;
};

struct ToyDemoResult {
    Json config;
    std::vector<ToyDemoSeed> seeds;
    std::vector<ResultsRecord> records;
};

/// Configuration of the PointSafety demo before overrides.
Json toy_demo_config();

/// Mean (noise-free) paths of pi_e under the neutral model and the fitted CA
/// adversary, each T rows with the confidence radius beta * sigma at (s_t, a_t).
/// A path is unsafe when some s_t (t < T) lies in the danger disc.
ToyDemoResult run_toy_demo(const std::vector<std::uint64_t>& seeds, const std::vector<std::string>& overrides = {},
                           const Logger& log = {});

/// Writes results.json and trajectories_seed<k>.csv into `dir`.
void write_toy_demo(const ToyDemoResult& result, const std::filesystem::path& dir);

} // namespace cope::harness
