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

#include "cope/mdp/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cope::mdp {

namespace {

// Rollouts per lockstep batch. Results do not depend on this value.
constexpr std::size_t kChunk = 2048;

void check_state(const StateVec& s, int t)
{
    if (!s.allFinite())
        throw RolloutFault("non-finite state at step " + std::to_string(t), t);
}

// Steps `streams.size()` rollouts in lockstep. `keep` receives the
// trajectories when non-null; returns are always written to `returns`.
void run_lockstep(const Environment& env, const Policy& policy, std::span<RolloutStreams> streams, double* returns,
                  Trajectory* keep)
{
    const auto n = static_cast<Eigen::Index>(streams.size());
    const int T = env.horizon();
    Batch S(n, env.state_dim());
    Batch A(n, env.action_dim());
    for (Eigen::Index i = 0; i < n; ++i) {
        StateVec s0 = env.sample_initial(streams[static_cast<std::size_t>(i)].main);
        check_state(s0, 0);
        S.row(i) = s0.transpose();
        returns[i] = 0.0;
        if (keep) {
            keep[i] = Trajectory{};
            keep[i].states.reserve(static_cast<std::size_t>(T) + 1);
            keep[i].states.push_back(s0);
        }
    }
    for (int t = 0; t < T; ++t) {
#pragma omp parallel for schedule(static) if (n > 64)
        for (Eigen::Index i = 0; i < n; ++i) {
            const StateVec s = S.row(i).transpose();
            const ActionVec a = policy.act(s, streams[static_cast<std::size_t>(i)].main);
            A.row(i) = a.transpose();
            const double r = env.reward(s, a);
            returns[i] += r;
            if (keep) {
                keep[i].actions.push_back(a);
                keep[i].rewards.push_back(r);
            }
        }
        S = env.step_batch(S, A, streams, t);
        if (!S.allFinite())
            throw RolloutFault("non-finite state at step " + std::to_string(t + 1), t + 1);
        if (keep)
            for (Eigen::Index i = 0; i < n; ++i)
                keep[i].states.push_back(S.row(i).transpose());
    }
}

void check_L(std::size_t L)
{
    if (L == 0)
        throw std::invalid_argument("number of rollouts must be >= 1");
}

} // namespace

double Trajectory::total_return() const
{
    double g = 0.0;
    for (double r : rewards)
        g += r;
    return g;
}

ReturnEstimate summarize_returns(const std::vector<double>& returns)
{
    if (returns.empty())
        throw std::invalid_argument("summarize_returns: empty");
    const auto L = static_cast<double>(returns.size());
    const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / L;
    double ss = 0.0;
    for (double g : returns)
        ss += (g - mean) * (g - mean);
    const double sd = returns.size() > 1 ? std::sqrt(ss / (L - 1.0)) : 0.0;
    return ReturnEstimate{mean, sd / std::sqrt(L), returns.size()};
}

Trajectory rollout(const Environment& env, const Policy& policy, RolloutStreams& streams)
{
    Trajectory tr;
    StateVec s = env.sample_initial(streams.main);
    check_state(s, 0);
    tr.states.push_back(s);
    for (int t = 0; t < env.horizon(); ++t) {
        const ActionVec a = policy.act(s, streams.main);
        tr.actions.push_back(a);
        tr.rewards.push_back(env.reward(s, a));
        s = env.step(s, a, streams, t);
        check_state(s, t + 1);
        tr.states.push_back(s);
    }
    return tr;
}

std::vector<Trajectory> rollouts(const Environment& env, const Policy& policy, std::size_t L, std::uint64_t seed)
{
    check_L(L);
    std::vector<Trajectory> out(L);
    std::vector<double> returns(L);
    for (std::size_t begin = 0; begin < L; begin += kChunk) {
        const std::size_t end = std::min(L, begin + kChunk);
        std::vector<RolloutStreams> streams;
        streams.reserve(end - begin);
        for (std::size_t l = begin; l < end; ++l)
            streams.push_back(RolloutStreams::for_rollout(seed, l));
        run_lockstep(env, policy, streams, returns.data() + begin, out.data() + begin);
    }
    return out;
}

std::vector<double> rollout_returns(const Environment& env, const Policy& policy, std::size_t L, std::uint64_t seed)
{
    check_L(L);
    std::vector<double> returns(L);
    for (std::size_t begin = 0; begin < L; begin += kChunk) {
        const std::size_t end = std::min(L, begin + kChunk);
        std::vector<RolloutStreams> streams;
        streams.reserve(end - begin);
        for (std::size_t l = begin; l < end; ++l)
            streams.push_back(RolloutStreams::for_rollout(seed, l));
        run_lockstep(env, policy, streams, returns.data() + begin, nullptr);
    }
    return returns;
}

ReturnEstimate mc_return_estimate(const Environment& env, const Policy& policy, std::size_t L, std::uint64_t seed)
{
    return summarize_returns(rollout_returns(env, policy, L, seed));
}

ReturnEstimate mc_return_estimate_serial(const Environment& env, const Policy& policy, std::size_t L,
                                         std::uint64_t seed)
{
    check_L(L);
    std::vector<double> returns;
    returns.reserve(L);
    for (std::size_t l = 0; l < L; ++l) {
        RolloutStreams streams = RolloutStreams::for_rollout(seed, l);
        returns.push_back(rollout(env, policy, streams).total_return());
    }
    return summarize_returns(returns);
}

double normalize_return(double value, double true_return)
{
    if (true_return == 0.0)
        throw std::invalid_argument("normalize_return: true return must be nonzero");
    return 1.0 + (value - true_return) / std::abs(true_return);
}

} // namespace cope::mdp
