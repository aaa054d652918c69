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

#include "cope/hambo/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cope::hambo {

Estimator parse_estimator(const std::string& name)
{
    if (name == "hambo-ca")
        return Estimator::HamboCA;
    if (name == "hambo-da1")
        return Estimator::HamboDA1;
    if (name == "hambo-dainf")
        return Estimator::HamboDAinf;
    if (name == "ope-ds")
        return Estimator::OpeDS;
    if (name == "ope-ts1")
        return Estimator::OpeTS1;
    if (name == "ope-tsinf")
        return Estimator::OpeTSinf;
    throw std::invalid_argument("unknown estimator '" + name + "'");
}

std::string to_string(Estimator e)
{
    switch (e) {
    case Estimator::HamboCA:
        return "hambo-ca";
    case Estimator::HamboDA1:
        return "hambo-da1";
    case Estimator::HamboDAinf:
        return "hambo-dainf";
    case Estimator::OpeDS:
        return "ope-ds";
    case Estimator::OpeTS1:
        return "ope-ts1";
    case Estimator::OpeTSinf:
        return "ope-tsinf";
    }
    return "?";
}

bool needs_ensemble(Estimator e)
{
    return e == Estimator::HamboDA1 || e == Estimator::HamboDAinf || e == Estimator::OpeTS1 ||
           e == Estimator::OpeTSinf;
}

namespace {

double mean_return(const mdp::Environment& env, const mdp::Policy& policy, std::size_t L, std::uint64_t seed)
{
    const std::vector<double> r = mdp::rollout_returns(env, policy, L, seed);
    return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

void fill_summary(AdversarySummary& s, const opt::OptimizerConfig& cfg, const opt::OptimizerResult& r)
{
    s.optimizer = opt::to_string(cfg.method);
    s.iterations = static_cast<int>(r.trace.size());
    s.evaluations = r.evaluations;
    s.failed_evaluations = r.failed_evaluations;
    s.best_objective = r.best_value;
    s.null_objective = r.null_value.value_or(std::numeric_limits<double>::quiet_NaN());
    for (const auto& t : r.trace)
        s.incumbent_trace.push_back(t.incumbent);
    s.best_params = r.best;
}

// Optimizes `make_env(params)` from the null parameters, then re-evaluates the
// winner, the null candidate and the injected `extra` candidates on the final
// seeds and keeps the lowest.
template <class MakeEnv>
CopeReport optimize_and_report(const std::string& name, const mdp::Policy& policy, const EstimatorConfig& cfg,
                               opt::OptimizerConfig ocfg, const Eigen::VectorXd& null_params,
                               const std::vector<Eigen::VectorXd>& extra, MakeEnv make_env)
{
    if (cfg.rollouts_per_candidate == 0 || cfg.L == 0)
        throw std::invalid_argument(name + ": rollout counts must be >= 1");
    const opt::Objective objective = [&](const Eigen::VectorXd& p, std::uint64_t seed) {
        return mean_return(*make_env(p), policy, cfg.rollouts_per_candidate, seed);
    };

    CopeReport rep;
    rep.estimator = name;
    std::vector<Eigen::VectorXd> finalists{null_params};
    try {
        const opt::OptimizerResult r = opt::minimize(objective, ocfg, null_params, extra);
        fill_summary(rep.adversary, ocfg, r);
        finalists.push_back(r.best);
    } catch (const opt::OptimizerError&) {
        rep.adversary.optimizer = opt::to_string(ocfg.method);
        rep.adversary.fallback = true;
        rep.adversary.best_params = null_params;
    }
    finalists.insert(finalists.end(), extra.begin(), extra.end());

    std::size_t best = 0;
    std::vector<Eigen::VectorXd> seen;
    for (std::size_t i = 0; i < finalists.size(); ++i) {
        if (std::find(seen.begin(), seen.end(), finalists[i]) != seen.end())
            continue;
        seen.push_back(finalists[i]);
        const mdp::ReturnEstimate est =
            mdp::summarize_returns(mdp::rollout_returns(*make_env(finalists[i]), policy, cfg.L, cfg.eval_seed));
        if (i == 0) {
            rep.neutral = est;
            rep.mc = est;
        } else if (est.mean < rep.mc.mean) {
            rep.mc = est;
            best = i;
        }
    }
    rep.adversary.null_selected = best == 0;
    rep.adversary.best_params = finalists[best];
    rep.J_tilde = rep.mc.mean;
    return rep;
}

std::vector<double> member_returns(const mdp::Environment& env, const mdp::Policy& policy,
                                   const std::shared_ptr<const bnn::Ensemble>& ensemble, int k, const EstimatorConfig& cfg)
{
    const auto henv = make_ensemble_hallucinated_env(ensemble, StepMode::Member, env, nullptr, nullptr, k);
    return mdp::rollout_returns(*henv, policy, cfg.L, cfg.eval_seed);
}

} // namespace

CopeReport estimate_hambo_ca(const mdp::Environment& env, const mdp::Policy& policy,
                             std::shared_ptr<const mdp::StatisticalModel> model, const EstimatorConfig& cfg)
{
    if (!model)
        throw std::invalid_argument("hambo-ca: null model");
    const int d_s = env.state_dim(), d_a = env.action_dim();
    opt::OptimizerConfig ocfg = cfg.opt;
    const Box b = cfg.adversary.bounds(d_s, d_a);
    ocfg.lo = b.lo;
    ocfg.hi = b.hi;
    const Eigen::VectorXd null_params = cfg.adversary.null_params(d_s, d_a);
    HallucinatedEnv::Setup base;
    base.mode = StepMode::CA;
    base.model = model;
    auto make_env = [&](const Eigen::VectorXd& p) {
        HallucinatedEnv::Setup s = base;
        if (p != null_params)
            s.continuous = cfg.adversary.make(p, d_s, d_a);
        return std::make_shared<const HallucinatedEnv>(env.task(), std::move(s));
    };
    return optimize_and_report("hambo-ca", policy, cfg, ocfg, null_params, {}, make_env);
}

CopeReport estimate_hambo_da1(const mdp::Environment& env, const mdp::Policy& policy,
                              std::shared_ptr<const bnn::Ensemble> ensemble, const EstimatorConfig& cfg)
{
    if (!ensemble)
        throw std::invalid_argument("hambo-da1: needs an ensemble");
    const int d_s = env.state_dim(), d_a = env.action_dim(), K = ensemble->size();
    opt::OptimizerConfig ocfg = cfg.opt;
    const Box b = cfg.discrete.bounds(d_s, d_a, K);
    ocfg.lo = b.lo;
    ocfg.hi = b.hi;
    const Eigen::VectorXd null_params = cfg.discrete.null_params(d_s, d_a, K);
    std::vector<Eigen::VectorXd> extra;
    if (K > 1)
        for (int k = 0; k < K; ++k)
            extra.push_back(cfg.discrete.constant_member_params(d_s, d_a, K, k));
    auto make_env = [&](const Eigen::VectorXd& p) {
        return make_ensemble_hallucinated_env(ensemble, StepMode::DA1, env, nullptr, cfg.discrete.make(p, d_s, d_a, K));
    };
    return optimize_and_report("hambo-da1", policy, cfg, ocfg, null_params, extra, make_env);
}

CopeReport estimate_hambo_dainf(const mdp::Environment& env, const mdp::Policy& policy,
                                std::shared_ptr<const bnn::Ensemble> ensemble, const EstimatorConfig& cfg)
{
    if (!ensemble)
        throw std::invalid_argument("hambo-dainf: needs an ensemble");
    if (cfg.L == 0)
        throw std::invalid_argument("hambo-dainf: L must be >= 1");
    const int K = ensemble->size();
    std::vector<mdp::ReturnEstimate> est;
    CopeReport rep;
    rep.estimator = "hambo-dainf";
    for (int k = 0; k < K; ++k) {
        est.push_back(mdp::summarize_returns(member_returns(env, policy, ensemble, k, cfg)));
        rep.member_values.push_back(est.back().mean);
    }
    std::vector<int> order(static_cast<std::size_t>(K));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return rep.member_values[static_cast<std::size_t>(a)] < rep.member_values[static_cast<std::size_t>(b)];
    });
    std::size_t pick = 0;
    if (cfg.dainf_quantile && K > 20) {
        const double delta = *cfg.dainf_quantile;
        if (!(delta > 0.0 && delta <= 1.0))
            throw std::invalid_argument("hambo-dainf: quantile must be in (0, 1]");
        pick = static_cast<std::size_t>(std::max(1.0, std::ceil(delta * K))) - 1;
    }
    const auto k = static_cast<std::size_t>(order[pick]);
    rep.mc = est[k];
    rep.J_tilde = rep.mc.mean;
    rep.adversary.optimizer = "exhaustive";
    rep.adversary.evaluations = K;
    rep.adversary.best_objective = rep.J_tilde;
    rep.adversary.best_params = Eigen::VectorXd::Constant(1, static_cast<double>(k));
    return rep;
}

CopeReport estimate_neutral(const mdp::Environment& env, const mdp::Policy& policy,
                            std::shared_ptr<const mdp::StatisticalModel> model,
                            std::shared_ptr<const bnn::Ensemble> ensemble, Estimator mode, const EstimatorConfig& cfg)
{
    if (cfg.L == 0)
        throw std::invalid_argument("neutral estimate: L must be >= 1");
    CopeReport rep;
    rep.estimator = to_string(mode);
    if (!model)
        model = ensemble;
    switch (mode) {
    case Estimator::OpeDS: {
        if (!model)
            throw std::invalid_argument("ope-ds: null model");
        HallucinatedEnv::Setup s;
        s.mode = StepMode::DS;
        s.model = model;
        const HallucinatedEnv henv(env.task(), std::move(s));
        rep.mc = mdp::summarize_returns(mdp::rollout_returns(henv, policy, cfg.L, cfg.eval_seed));
        break;
    }
    case Estimator::OpeTS1: {
        if (!ensemble)
            throw std::invalid_argument("ope-ts1: needs an ensemble");
        const auto henv = make_ensemble_hallucinated_env(ensemble, StepMode::TS1, env);
        rep.mc = mdp::summarize_returns(mdp::rollout_returns(*henv, policy, cfg.L, cfg.eval_seed));
        break;
    }
    case Estimator::OpeTSinf: {
        if (!ensemble)
            throw std::invalid_argument("ope-tsinf: needs an ensemble");
        std::vector<double> avg(cfg.L, 0.0);
        for (int k = 0; k < ensemble->size(); ++k) {
            const std::vector<double> r = member_returns(env, policy, ensemble, k, cfg);
            rep.member_values.push_back(std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size()));
            for (std::size_t l = 0; l < cfg.L; ++l)
                avg[l] += r[l];
        }
        for (double& a : avg)
            a /= ensemble->size();
        rep.mc = mdp::summarize_returns(avg);
        break;
    }
    default:
        throw std::invalid_argument("estimate_neutral: not a neutral estimator");
    }
    rep.J_tilde = rep.mc.mean;
    rep.neutral = rep.mc;
    return rep;
}

CopeReport run_estimator(Estimator e, const mdp::Environment& env, const mdp::Policy& policy,
                         std::shared_ptr<const mdp::StatisticalModel> model,
                         std::shared_ptr<const bnn::Ensemble> ensemble, const EstimatorConfig& cfg)
{
    if (needs_ensemble(e) && !ensemble)
        throw std::invalid_argument(to_string(e) + " requires an ensemble model");
    switch (e) {
    case Estimator::HamboCA:
        return estimate_hambo_ca(env, policy, model ? model : ensemble, cfg);
    case Estimator::HamboDA1:
        return estimate_hambo_da1(env, policy, ensemble, cfg);
    case Estimator::HamboDAinf:
        return estimate_hambo_dainf(env, policy, ensemble, cfg);
    default:
        return estimate_neutral(env, policy, model, ensemble, e, cfg);
    }
}

GapBound gap_bound(const GapBoundInputs& in)
{
    if (in.T < 1 || in.d_s < 1)
        throw std::invalid_argument("gap_bound: T and d_s must be >= 1");
    if (!(in.L_r >= 0.0 && in.L_pi >= 0.0 && in.L_f >= 0.0 && in.L_sigma >= 0.0 && in.beta >= 0.0 &&
          in.expected_sigma_norm >= 0.0))
        throw std::invalid_argument("gap_bound: constants must be >= 0");
    const double lift = 1.0 + in.L_pi;
    const double Lr = in.L_r * lift, Lf = in.L_f * lift, Ls = in.L_sigma * lift;
    const double c = 1.0 + std::sqrt(static_cast<double>(in.d_s));
    const double T = in.T;
    GapBound out;
    out.C_n = Lr * c * in.beta * T * T * std::pow(1.0 + Lf + c * in.beta * Ls, in.T - 1);
    if (in.expected_sigma_norm == 0.0) {
        out.value = 0.0;
        out.vacuous = false;
        return out;
    }
    out.value = out.C_n * in.expected_sigma_norm;
    out.vacuous = std::isinf(out.value) || std::isnan(out.value);
    if (out.vacuous)
        out.value = std::numeric_limits<double>::infinity();
    return out;
}

} // namespace cope::hambo
