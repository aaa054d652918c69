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

// Parallel kernels against their serial reference paths.

#include "cope/bnn/mlp.hpp"
#include "cope/bnn/svgd.hpp"
#include "cope/envs/pendulum.hpp"
#include "cope/gp/regressor.hpp"
#include "cope/mdp/rollout.hpp"

#include <benchmark/benchmark.h>

using namespace cope;

namespace {

void BM_RolloutsSerial(benchmark::State& state)
{
    const auto env = envs::make_pendulum();
    const auto pi = envs::make_pendulum_controller();
    const auto L = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mdp::mc_return_estimate_serial(*env, *pi, L, 1).mean);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * L));
}

void BM_RolloutsLockstep(benchmark::State& state)
{
    const auto env = envs::make_pendulum();
    const auto pi = envs::make_pendulum_controller();
    const auto L = static_cast<std::size_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mdp::mc_return_estimate(*env, *pi, L, 1).mean);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * L));
}

gp::GPRegressor make_gp(Eigen::Index n)
{
    Rng rng(2);
    Eigen::MatrixXd X(n, 3), Y(n, 2);
    for (Eigen::Index i = 0; i < X.size(); ++i)
        X.data()[i] = rng.uniform(-2.0, 2.0);
    for (Eigen::Index i = 0; i < Y.size(); ++i)
        Y.data()[i] = rng.normal();
    return gp::GPRegressor::fit(X, Y, gp::Kernel::rbf(1.0), 0.1);
}

Eigen::MatrixXd queries(Eigen::Index m)
{
    Rng rng(3);
    Eigen::MatrixXd Q(m, 3);
    for (Eigen::Index i = 0; i < Q.size(); ++i)
        Q.data()[i] = rng.uniform(-2.0, 2.0);
    return Q;
}

void BM_GPPredictPerQuery(benchmark::State& state)
{
    const auto fit = make_gp(state.range(0));
    const Eigen::MatrixXd Q = queries(1000);
    for (auto _ : state)
        for (Eigen::Index i = 0; i < Q.rows(); ++i)
            benchmark::DoNotOptimize(fit.predict_one(Q.row(i).transpose()).variance[0]);
    state.SetItemsProcessed(state.iterations() * Q.rows());
}

void BM_GPPredictBatched(benchmark::State& state)
{
    const auto fit = make_gp(state.range(0));
    const Eigen::MatrixXd Q = queries(1000);
    for (auto _ : state)
        benchmark::DoNotOptimize(fit.predict(Q).variance[0]);
    state.SetItemsProcessed(state.iterations() * Q.rows());
}

struct SVGDProblem {
    bnn::MLPArch arch;
    std::vector<Eigen::VectorXd> particles;
    Eigen::MatrixXd X, Y;
};

SVGDProblem svgd_problem(int K)
{
    Rng rng(4);
    SVGDProblem p;
    p.arch.input_dim = 4;
    p.arch.hidden = {64, 64};
    p.arch.target_dim = 2;
    for (int k = 0; k < K; ++k)
        p.particles.push_back(bnn::init_params(p.arch, rng));
    p.X.resize(64, 4);
    p.Y.resize(64, 2);
    for (Eigen::Index i = 0; i < p.X.size(); ++i)
        p.X.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < p.Y.size(); ++i)
        p.Y.data()[i] = rng.normal();
    return p;
}

void BM_ParticleGradientsSerial(benchmark::State& state)
{
    const auto p = svgd_problem(static_cast<int>(state.range(0)));
    Eigen::VectorXd g;
    for (auto _ : state)
        for (const auto& theta : p.particles)
            benchmark::DoNotOptimize(bnn::log_posterior(p.arch, theta, p.X, p.Y, 1e-3, 1.0, &g));
}

void BM_ParticleGradientsParallel(benchmark::State& state)
{
    const auto p = svgd_problem(static_cast<int>(state.range(0)));
    std::vector<Eigen::VectorXd> grads;
    for (auto _ : state)
        benchmark::DoNotOptimize(bnn::particle_gradients(p.arch, p.particles, p.X, p.Y, 1e-3, 1.0, grads).front());
}

} // namespace

BENCHMARK(BM_RolloutsSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RolloutsLockstep)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GPPredictPerQuery)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GPPredictBatched)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParticleGradientsSerial)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ParticleGradientsParallel)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
