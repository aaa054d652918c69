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

#include "cope/opt/optimizer.hpp"

#include "cope/common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cope::opt {

Method parse_method(const std::string& name)
{
    if (name == "cem")
        return Method::CEM;
    if (name == "random-search")
        return Method::RandomSearch;
    if (name == "exhaustive")
        return Method::Exhaustive;
    throw std::invalid_argument("unknown optimizer '" + name + "' (expected cem, random-search or exhaustive)");
}

std::string to_string(Method method)
{
    switch (method) {
    case Method::CEM:
        return "cem";
    case Method::RandomSearch:
        return "random-search";
    case Method::Exhaustive:
        return "exhaustive";
    }
    return "?";
}

int OptimizerConfig::elite_count() const
{
    return std::max(1, static_cast<int>(std::ceil(elite_fraction * population)));
}

void OptimizerConfig::validate(Eigen::Index dim) const
{
    if (population < 1 || iterations < 1)
        throw std::invalid_argument("optimizer: population and iterations must be >= 1");
    if (!(elite_fraction > 0.0 && elite_fraction < 1.0) && !(elite_fraction == 1.0 && population == 1))
        throw std::invalid_argument("optimizer: elite fraction must be in (0, 1)");
    if (lo.size() != dim || hi.size() != dim)
        throw std::invalid_argument("optimizer: bounds dimension mismatch");
    if (!lo.allFinite() || !hi.allFinite() || (lo.array() > hi.array()).any())
        throw std::invalid_argument("optimizer: bounds must be finite with lo <= hi");
    if (!(init_std > 0.0) || !(std_floor >= 0.0))
        throw std::invalid_argument("optimizer: init_std must be > 0 and std_floor >= 0");
    if (init_mean.size() != 0 && init_mean.size() != dim)
        throw std::invalid_argument("optimizer: init_mean dimension mismatch");
}

std::uint64_t evaluation_seed(const OptimizerConfig& cfg, std::uint64_t index)
{
    return derive_seed(cfg.seed, 30, cfg.common_random_numbers ? 0 : index + 1);
}

namespace {

struct Generation {
    std::vector<double> values;
    int failed = 0;
};

Generation evaluate(const Objective& f, const OptimizerConfig& cfg, const std::vector<Eigen::VectorXd>& cands,
                    std::uint64_t first_index)
{
    Generation g;
    g.values.assign(cands.size(), std::numeric_limits<double>::infinity());
    std::vector<char> failed(cands.size(), 0);
    const auto n = static_cast<std::ptrdiff_t>(cands.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            const double v = f(cands[k], evaluation_seed(cfg, first_index + k));
            if (std::isnan(v))
                failed[k] = 1;
            else
                g.values[k] = v;
        } catch (...) {
            failed[k] = 1;
        }
    }
    g.failed = static_cast<int>(std::count(failed.begin(), failed.end(), 1));
    if (g.failed == static_cast<int>(cands.size()))
        throw OptimizerError("optimizer: every candidate evaluation failed");
    return g;
}

// Lowest value, ties to the lowest index.
std::size_t argmin(const std::vector<double>& v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[best])
            best = i;
    return best;
}

void clamp(Eigen::VectorXd& x, const OptimizerConfig& cfg)
{
    x = x.cwiseMax(cfg.lo).cwiseMin(cfg.hi);
}

} // namespace

OptimizerResult cem_minimize(const Objective& f, const OptimizerConfig& cfg,
                             const std::optional<Eigen::VectorXd>& null_candidate,
                             const std::vector<Eigen::VectorXd>& extra)
{
    const Eigen::Index dim = cfg.lo.size();
    cfg.validate(dim);
    Eigen::VectorXd mean = cfg.init_mean.size() ? cfg.init_mean
                           : null_candidate     ? *null_candidate
                                                : Eigen::VectorXd(0.5 * (cfg.lo + cfg.hi));
    clamp(mean, cfg);
    Eigen::VectorXd sd = Eigen::VectorXd::Constant(dim, cfg.init_std);
    const int n_elite = std::min(cfg.elite_count(), cfg.population);

    OptimizerResult res;
    res.best_value = std::numeric_limits<double>::infinity();
    std::uint64_t index = 0;
    for (int it = 0; it < cfg.iterations; ++it) {
        std::vector<Eigen::VectorXd> cands;
        if (null_candidate)
            cands.push_back(*null_candidate);
        if (it == 0)
            for (const auto& e : extra)
                cands.push_back(e);
        Rng rng(derive_seed(cfg.seed, 40, static_cast<std::uint64_t>(it)));
        const int n_sampled = cfg.population - (null_candidate ? 1 : 0);
        for (int i = 0; i < n_sampled; ++i) {
            Eigen::VectorXd x(dim);
            for (Eigen::Index j = 0; j < dim; ++j)
                x[j] = mean[j] + sd[j] * rng.normal();
            clamp(x, cfg);
            cands.push_back(std::move(x));
        }
        for (auto& c : cands)
            if (c.size() != dim)
                throw std::invalid_argument("cem: candidate dimension mismatch");

        const Generation g = evaluate(f, cfg, cands, index);
        index += cands.size();
        res.evaluations += static_cast<int>(cands.size());
        res.failed_evaluations += g.failed;
        if (null_candidate && !res.null_value)
            res.null_value = g.values[0];

        std::vector<std::size_t> order(cands.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return g.values[a] < g.values[b]; });
        const std::size_t gbest = order[0];
        if (g.values[gbest] < res.best_value || res.best.size() == 0) {
            res.best_value = g.values[gbest];
            res.best = cands[gbest];
            res.best_index = gbest;
        }

        const int k = std::min<int>(n_elite, static_cast<int>(cands.size()) - g.failed);
        Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
        for (int e = 0; e < k; ++e)
            m += cands[order[static_cast<std::size_t>(e)]];
        m /= k;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
        for (int e = 0; e < k; ++e)
            v += (cands[order[static_cast<std::size_t>(e)]] - m).cwiseAbs2();
        v /= k;
        mean = m;
        sd = v.cwiseSqrt().cwiseMax(cfg.std_floor);
        res.trace.push_back(TraceEntry{mean, sd, g.values[gbest], res.best_value});
    }
    return res;
}

OptimizerResult random_search_minimize(const Objective& f, const OptimizerConfig& cfg,
                                       const std::optional<Eigen::VectorXd>& null_candidate,
                                       const std::vector<Eigen::VectorXd>& extra)
{
    const Eigen::Index dim = cfg.lo.size();
    cfg.validate(dim);
    const int n = cfg.samples > 0 ? cfg.samples : cfg.population * cfg.iterations;
    std::vector<Eigen::VectorXd> cands;
    if (null_candidate)
        cands.push_back(*null_candidate);
    for (const auto& e : extra)
        cands.push_back(e);
    Rng rng(derive_seed(cfg.seed, 41, 0));
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd x(dim);
        for (Eigen::Index j = 0; j < dim; ++j)
            x[j] = rng.uniform(cfg.lo[j], cfg.hi[j]);
        cands.push_back(std::move(x));
    }
    const Generation g = evaluate(f, cfg, cands, 0);
    OptimizerResult res;
    res.best_index = argmin(g.values);
    res.best = cands[res.best_index];
    res.best_value = g.values[res.best_index];
    if (null_candidate)
        res.null_value = g.values[0];
    res.evaluations = static_cast<int>(cands.size());
    res.failed_evaluations = g.failed;
    res.trace.push_back(TraceEntry{res.best, Eigen::VectorXd::Zero(dim), res.best_value, res.best_value});
    return res;
}

OptimizerResult exhaustive_minimize(const Objective& f, const std::vector<Eigen::VectorXd>& candidates,
                                    const OptimizerConfig& cfg)
{
    if (candidates.empty())
        throw std::invalid_argument("exhaustive_minimize: empty candidate list");
    const Generation g = evaluate(f, cfg, candidates, 0);
    OptimizerResult res;
    res.best_index = argmin(g.values);
    res.best = candidates[res.best_index];
    res.best_value = g.values[res.best_index];
    res.values = g.values;
    res.evaluations = static_cast<int>(candidates.size());
    res.failed_evaluations = g.failed;
    res.trace.push_back(TraceEntry{res.best, Eigen::VectorXd::Zero(res.best.size()), res.best_value, res.best_value});
    return res;
}

OptimizerResult minimize(const Objective& f, const OptimizerConfig& cfg,
                         const std::optional<Eigen::VectorXd>& null_candidate,
                         const std::vector<Eigen::VectorXd>& extra)
{
    switch (cfg.method) {
    case Method::CEM:
        return cem_minimize(f, cfg, null_candidate, extra);
    case Method::RandomSearch:
        return random_search_minimize(f, cfg, null_candidate, extra);
    case Method::Exhaustive: {
        std::vector<Eigen::VectorXd> cands;
        if (null_candidate)
            cands.push_back(*null_candidate);
        cands.insert(cands.end(), extra.begin(), extra.end());
        OptimizerResult res = exhaustive_minimize(f, cands, cfg);
        if (null_candidate)
            res.null_value = res.values[0];
        return res;
    }
    }
    throw std::logic_error("unreachable");
}

} // namespace cope::opt
