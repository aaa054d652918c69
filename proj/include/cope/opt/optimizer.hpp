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

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cope::opt {

enum class Method { CEM, RandomSearch, Exhaustive };

Method parse_method(const std::string& name);
std::string to_string(Method method);

struct OptimizerConfig {
    Method method = Method::CEM;
    int population = 64;
    double elite_fraction = 0.125;
    int iterations = 30;
    double init_std = 1.0;
    double std_floor = 0.02;
    /// Uniform samples for random search; 0 means population * iterations.
    int samples = 0;
    /// Parameter bounds; every candidate is clamped into [lo, hi].
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    /// Initial CEM mean; empty means the null candidate (or the box centre without one).
    Eigen::VectorXd init_mean;
    bool common_random_numbers = true;
    std::uint64_t seed = 0;

    int elite_count() const;
    void validate(Eigen::Index dim) const;
};

/// Objective to minimize. Must be pure given (params, seed) and safe to call concurrently.
using Objective = std::function<double(const Eigen::VectorXd& params, std::uint64_t seed)>;

struct TraceEntry {
    Eigen::VectorXd elite_mean;
    Eigen::VectorXd elite_std;
    double generation_best = 0.0;
    /// Best value seen so far; nonincreasing.
    double incumbent = 0.0;
};

struct OptimizerResult {
    Eigen::VectorXd best;
    double best_value = 0.0;
    /// Index of the winner in its generation's candidate list (exhaustive: in the input list).
    std::size_t best_index = 0;
    /// Objective at the null candidate, when one was supplied.
    std::optional<double> null_value;
    /// Exhaustive search: the value of every candidate, in input order.
    std::vector<double> values;
    int evaluations = 0;
    int failed_evaluations = 0;
    std::vector<TraceEntry> trace;
};

class OptimizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Seed handed to the objective for evaluation `index`: one fixed seed for
/// every candidate under common random numbers, a fresh one otherwise.
std::uint64_t evaluation_seed(const OptimizerConfig& cfg, std::uint64_t index);

/// Cross-entropy method. The null candidate (when given) is part of every
/// generation and `extra` candidates are added to the first one, so the result
/// is never worse than any of them. Evaluations that throw count as +inf;
/// OptimizerError if a whole generation fails.
OptimizerResult cem_minimize(const Objective& f, const OptimizerConfig& cfg,
                             const std::optional<Eigen::VectorXd>& null_candidate,
                             const std::vector<Eigen::VectorXd>& extra = {});

/// Best of `samples` uniform draws in the bounds plus the null and extra candidates.
OptimizerResult random_search_minimize(const Objective& f, const OptimizerConfig& cfg,
                                       const std::optional<Eigen::VectorXd>& null_candidate,
                                       const std::vector<Eigen::VectorXd>& extra = {});

/// Exact minimum over an explicit list; ties go to the lowest index.
OptimizerResult exhaustive_minimize(const Objective& f, const std::vector<Eigen::VectorXd>& candidates,
                                    const OptimizerConfig& cfg = {});

/// Dispatches on cfg.method; Exhaustive evaluates null + extra only.
OptimizerResult minimize(const Objective& f, const OptimizerConfig& cfg,
                         const std::optional<Eigen::VectorXd>& null_candidate,
                         const std::vector<Eigen::VectorXd>& extra = {});

} // namespace cope::opt
