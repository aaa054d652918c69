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

#include "cope/common/rng.hpp"
#include "cope/opt/optimizer.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>

using namespace cope;
using namespace cope::opt;

namespace {

OptimizerConfig box_config(Eigen::Index dim, double bound)
{
    OptimizerConfig cfg;
    cfg.lo = Eigen::VectorXd::Constant(dim, -bound);
    cfg.hi = Eigen::VectorXd::Constant(dim, bound);
    return cfg;
}

double quadratic(const Eigen::VectorXd& x, std::uint64_t) { return x.squaredNorm(); }

} // namespace

TEST_CASE("cem minimizes a quadratic from a distant start")
{
    OptimizerConfig cfg = box_config(4, 10.0);
    cfg.init_mean = Eigen::Vector4d(4.0, -4.0, 4.0, -4.0);
    cfg.init_std = 5.0;
    cfg.seed = 3;
    const auto res = cem_minimize(quadratic, cfg, std::nullopt);
    CHECK(res.best.norm() < 0.1);
    CHECK(res.best_value == doctest::Approx(res.best.squaredNorm()));
    CHECK(!res.null_value);
    CHECK(res.evaluations == cfg.population * cfg.iterations);
    CHECK(res.trace.size() == static_cast<std::size_t>(cfg.iterations));
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        CHECK(res.trace[i].incumbent <= res.trace[i - 1].incumbent);
}

TEST_CASE("cem reaches the quadratic optimum across seeds")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        OptimizerConfig cfg = box_config(4, 10.0);
        cfg.init_mean = Eigen::Vector4d(4.0, -4.0, 4.0, -4.0);
        cfg.init_std = 5.0;
        cfg.seed = seed;
        CHECK(cem_minimize(quadratic, cfg, std::nullopt).best.norm() < 0.1);
    }
}

TEST_CASE("random search on a 1-D quadratic")
{
    OptimizerConfig cfg = box_config(1, 1.0);
    cfg.samples = 1000;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        cfg.seed = seed;
        CHECK(random_search_minimize(quadratic, cfg, std::nullopt).best_value < 0.01);
    }
}

TEST_CASE("cem keeps candidates inside the bounds")
{
    OptimizerConfig cfg = box_config(3, 1.0);
    cfg.init_std = 50.0;
    cfg.iterations = 3;
    const auto res = cem_minimize(
        [](const Eigen::VectorXd& x, std::uint64_t) {
            if ((x.array().abs() > 1.0).any())
                throw std::runtime_error("out of bounds");
            return -x.sum();
        },
        cfg, std::nullopt);
    CHECK(res.failed_evaluations == 0);
    CHECK(res.best_value <= -2.5);
}

TEST_CASE("the null candidate is never beaten by a worse result")
{
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        OptimizerConfig cfg = box_config(2, 5.0);
        cfg.iterations = 2;
        cfg.population = 4;
        cfg.seed = rng.engine()();
        const Eigen::Vector2d target(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0));
        const Objective f = [&](const Eigen::VectorXd& x, std::uint64_t) { return (x - target).norm(); };
        for (const Method m : {Method::CEM, Method::RandomSearch, Method::Exhaustive}) {
            cfg.method = m;
            const auto res = minimize(f, cfg, target);
            REQUIRE(res.null_value);
            CHECK(*res.null_value == 0.0);
            CHECK(res.best_value == 0.0);
            CHECK(res.best_value <= *res.null_value);
        }
    }
}

TEST_CASE("extra candidates are evaluated once")
{
    OptimizerConfig cfg = box_config(1, 5.0);
    cfg.iterations = 3;
    cfg.population = 5;
    const Eigen::VectorXd good = Eigen::VectorXd::Constant(1, 4.0);
    std::atomic<int> hits{0};
    const auto res = cem_minimize(
        [&](const Eigen::VectorXd& x, std::uint64_t) {
            if (x[0] == 4.0)
                ++hits;
            return std::abs(x[0] - 4.0);
        },
        cfg, Eigen::VectorXd::Zero(1), {good});
    CHECK(hits.load() >= 1);
    CHECK(res.best[0] == 4.0);
    CHECK(res.evaluations == 3 * 5 + 1);
}

TEST_CASE("exhaustive search breaks ties to the lowest index")
{
    std::vector<Eigen::VectorXd> cands;
    for (double v : {3.0, 1.0, 2.0, 1.0, 5.0})
        cands.push_back(Eigen::VectorXd::Constant(1, v));
    const auto res = exhaustive_minimize([](const Eigen::VectorXd& x, std::uint64_t) { return std::abs(x[0] - 1.0); },
                                         cands);
    CHECK(res.best_index == 1);
    CHECK(res.values.size() == 5);
    CHECK(res.values[3] == 0.0);
    CHECK_THROWS_AS(exhaustive_minimize(quadratic, {}), std::invalid_argument);
}

TEST_CASE("failed evaluations count as infinity and total failure throws")
{
    OptimizerConfig cfg = box_config(1, 1.0);
    cfg.iterations = 2;
    cfg.population = 6;
    const auto res = cem_minimize(
        [](const Eigen::VectorXd& x, std::uint64_t) {
            if (x[0] > 0.0)
                throw std::runtime_error("boom");
            return x[0];
        },
        cfg, Eigen::VectorXd::Constant(1, -0.5));
    CHECK(res.failed_evaluations > 0);
    CHECK(std::isfinite(res.best_value));
    CHECK(res.best[0] <= 0.0);

    const Objective nan_everywhere = [](const Eigen::VectorXd&, std::uint64_t) { return std::nan(""); };
    CHECK_THROWS_AS(cem_minimize(nan_everywhere, cfg, std::nullopt), OptimizerError);
    CHECK_THROWS_AS(random_search_minimize(nan_everywhere, cfg, std::nullopt), OptimizerError);
}

TEST_CASE("common random numbers share one evaluation seed")
{
    OptimizerConfig cfg;
    cfg.seed = 17;
    CHECK(evaluation_seed(cfg, 0) == evaluation_seed(cfg, 99));
    cfg.common_random_numbers = false;
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i)
        seen.insert(evaluation_seed(cfg, i));
    CHECK(seen.size() == 100);
}

TEST_CASE("random search uses its sample budget and is reproducible")
{
    OptimizerConfig cfg = box_config(2, 3.0);
    cfg.samples = 500;
    cfg.seed = 4;
    const auto a = random_search_minimize(quadratic, cfg, std::nullopt);
    const auto b = random_search_minimize(quadratic, cfg, std::nullopt);
    CHECK(a.evaluations == 500);
    CHECK(a.best == b.best);
    CHECK(a.best_value < 0.1);
    CHECK((a.best.array().abs() <= 3.0).all());
}

TEST_CASE("config validation and method names")
{
    OptimizerConfig cfg = box_config(2, 1.0);
    CHECK_NOTHROW(cfg.validate(2));
    CHECK_THROWS(cfg.validate(3));
    cfg.population = 0;
    CHECK_THROWS(cfg.validate(2));
    cfg = box_config(2, 1.0);
    cfg.elite_fraction = 0.0;
    CHECK_THROWS(cfg.validate(2));
    cfg = box_config(2, 1.0);
    cfg.hi[0] = -2.0;
    CHECK_THROWS(cfg.validate(2));
    CHECK(cfg.elite_count() >= 1);
    CHECK(parse_method("random-search") == Method::RandomSearch);
    CHECK(to_string(Method::CEM) == "cem");
    CHECK_THROWS(parse_method("sac"));
}
