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

#include "support.hpp"

#include "cope/mdp/dataset.hpp"
#include "cope/mdp/rollout.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace cope;

TEST_CASE("derive_seed separates tags and indices")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 8; ++tag)
        for (std::uint64_t i = 0; i < 64; ++i)
            seen.insert(derive_seed(7, tag, i));
    CHECK(seen.size() == 8 * 64);
    CHECK(derive_seed(7, 1, 2) == derive_seed(7, 1, 2));
    CHECK(derive_seed(7, 1, 2) != derive_seed(8, 1, 2));
}

TEST_CASE("Rng replays its sequence")
{
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i)
        CHECK(a.normal() == b.normal());
    CHECK(a.uniform(2.0, 3.0) >= 2.0);
    for (int i = 0; i < 100; ++i)
        CHECK(a.index(3) < 3);
}

TEST_CASE("wrap_angle maps into (-pi, pi]")
{
    using std::numbers::pi;
    CHECK(mdp::wrap_angle(pi) == doctest::Approx(pi));
    CHECK(mdp::wrap_angle(-pi) == doctest::Approx(pi));
    CHECK(mdp::wrap_angle(0.0) == 0.0);
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-50.0, 50.0);
        const double y = mdp::wrap_angle(x);
        CHECK(y > -pi);
        CHECK(y <= pi + 1e-12);
        const double k = (x - y) / (2.0 * pi);
        CHECK(std::abs(k - std::round(k)) < 1e-9);
    }
}

TEST_CASE("topology difference wraps periodic dimensions only")
{
    mdp::StateTopology topo = mdp::StateTopology::euclidean(2);
    topo.periodic[0] = true;
    Batch next(1, 2), prev(1, 2);
    next << 3.1, 5.0;
    prev << -3.1, 1.0;
    const Batch d = topo.difference(next, prev);
    CHECK(d(0, 0) == doctest::Approx(6.2 - 2.0 * std::numbers::pi));
    CHECK(d(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("rollout has exactly T steps and a consistent return")
{
    const auto env = testing::linear_env(2, 7, 0.1);
    const auto pi = testing::linear_policy(2, 0.3);
    auto streams = RolloutStreams::for_rollout(5, 0);
    const mdp::Trajectory tr = mdp::rollout(*env, *pi, streams);
    CHECK(tr.length() == 7);
    CHECK(tr.states.size() == 8);
    double sum = 0.0;
    for (int t = 0; t < 7; ++t)
        sum += -tr.states[static_cast<std::size_t>(t)].squaredNorm();
    CHECK(tr.total_return() == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("noise-free rollout matches a hand-stepped oracle")
{
    const auto env = testing::linear_env(2, 5, 0.0, 0.8, 0.5);
    const auto pi = testing::linear_policy(2, 0.4);
    auto streams = RolloutStreams::for_rollout(11, 3);
    const mdp::Trajectory tr = mdp::rollout(*env, *pi, streams);
    Eigen::VectorXd s = tr.states[0];
    double ret = 0.0;
    for (int t = 0; t < 5; ++t) {
        ret -= s.squaredNorm();
        const Eigen::VectorXd a = (-0.4 * s).cwiseMax(-1.0).cwiseMin(1.0);
        s = 0.8 * s + 0.5 * a;
    }
    CHECK((s - tr.states.back()).norm() < 1e-14);
    CHECK(tr.total_return() == doctest::Approx(ret).epsilon(1e-14));
}

TEST_CASE("lockstep rollouts equal one-at-a-time rollouts")
{
    const auto env = testing::linear_env(3, 9, 0.2);
    const auto pi = testing::linear_policy(3, 0.5);
    const auto batched = mdp::rollouts(*env, *pi, 40, 17);
    for (std::size_t l = 0; l < 40; ++l) {
        auto streams = RolloutStreams::for_rollout(17, l);
        const auto single = mdp::rollout(*env, *pi, streams);
        CHECK(single.total_return() == batched[l].total_return());
    }
    const auto par = mdp::mc_return_estimate(*env, *pi, 300, 4);
    const auto ser = mdp::mc_return_estimate_serial(*env, *pi, 300, 4);
    CHECK(par.mean == ser.mean);
    CHECK(par.std_error == ser.std_error);
}

TEST_CASE("smaller L is a prefix of larger L")
{
    const auto env = testing::linear_env(2, 6, 0.3);
    const auto pi = testing::linear_policy(2, 0.5);
    const auto a = mdp::rollout_returns(*env, *pi, 10, 8);
    const auto b = mdp::rollout_returns(*env, *pi, 5000, 8);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == b[i]);
}

TEST_CASE("summarize_returns matches the sample formula")
{
    const std::vector<double> r{1.0, 2.0, 4.0, 7.0};
    const double mean = 3.5;
    double ss = 0.0;
    for (double x : r)
        ss += (x - mean) * (x - mean);
    const auto est = mdp::summarize_returns(r);
    CHECK(est.mean == doctest::Approx(mean));
    CHECK(est.std_error == doctest::Approx(std::sqrt(ss / 3.0) / 2.0));
    CHECK(est.num_rollouts == 4);
    CHECK_THROWS_AS(mdp::summarize_returns({}), std::invalid_argument);
}

TEST_CASE("mc_return_estimate rejects L = 0")
{
    const auto env = testing::linear_env(1, 3, 0.0);
    const auto pi = testing::linear_policy(1, 0.1);
    CHECK_THROWS_AS(mdp::mc_return_estimate(*env, *pi, 0, 1), std::invalid_argument);
}

TEST_CASE("MC estimate of a deterministic system has zero error")
{
    mdp::Task task;
    task.name = "const";
    task.state_dim = 1;
    task.action_dim = 1;
    task.horizon = 4;
    task.action_box = Box::uniform(1, -1.0, 1.0);
    task.reward = [](const StateVec& s, const ActionVec&) { return s[0]; };
    task.initial = [](Rng&) { return StateVec::Constant(1, 1.0); };
    task.topology = mdp::StateTopology::euclidean(1);
    const mdp::SimulatedEnvironment env(
        task, [](const StateVec& s, const ActionVec&) -> StateVec { return 2.0 * s; }, Eigen::VectorXd::Zero(1));
    const auto est = mdp::mc_return_estimate(env, *testing::linear_policy(1, 0.0), 20, 0);
    CHECK(est.mean == 1.0 + 2.0 + 4.0 + 8.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("non-finite states raise RolloutFault with the step")
{
    mdp::Task task;
    task.name = "blowup";
    task.state_dim = 1;
    task.action_dim = 1;
    task.horizon = 5;
    task.action_box = Box::uniform(1, -1.0, 1.0);
    task.reward = [](const StateVec&, const ActionVec&) { return 0.0; };
    task.initial = [](Rng&) { return StateVec::Constant(1, 1.0); };
    task.topology = mdp::StateTopology::euclidean(1);
    const mdp::SimulatedEnvironment env(
        task,
        [](const StateVec& s, const ActionVec&) -> StateVec {
            return s[0] > 3.0 ? StateVec::Constant(1, std::nan("")) : StateVec(2.0 * s);
        },
        Eigen::VectorXd::Zero(1));
    const auto pi = testing::linear_policy(1, 0.0);
    try {
        mdp::mc_return_estimate(env, *pi, 3, 0);
        FAIL("expected RolloutFault");
    } catch (const RolloutFault& f) {
        CHECK(f.step() == 3);
    }
}

TEST_CASE("normalize_return is 1 at the truth and order preserving")
{
    CHECK(mdp::normalize_return(-30.0, -30.0) == 1.0);
    CHECK(mdp::normalize_return(12.0, 12.0) == 1.0);
    CHECK(mdp::normalize_return(-60.0, -30.0) == doctest::Approx(0.0));
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const double J = rng.uniform(-100.0, -1.0);
        const double a = rng.uniform(-200.0, 0.0), b = rng.uniform(-200.0, 0.0);
        CHECK((a < b) == (mdp::normalize_return(a, J) < mdp::normalize_return(b, J)));
    }
    CHECK_THROWS_AS(mdp::normalize_return(1.0, 0.0), std::invalid_argument);
}

namespace {

mdp::Dataset small_dataset(std::size_t n, std::uint64_t seed)
{
    const auto env = testing::linear_env(2, 5, 0.1);
    return mdp::generate_uniform_dataset(*env, Box::uniform(2, -2.0, 2.0), n, seed);
}

} // namespace

TEST_CASE("uniform datasets: smaller n is a prefix of larger n")
{
    const auto a = small_dataset(30, 9);
    const auto b = small_dataset(100, 9);
    REQUIRE(a.size() == 30);
    CHECK(a == b.prefix(30));
    CHECK_THROWS_AS(small_dataset(0, 9), std::invalid_argument);
}

TEST_CASE("uniform dataset transitions follow the environment")
{
    const auto env = testing::linear_env(2, 5, 0.0, 0.7, 0.2);
    const auto d = mdp::generate_uniform_dataset(*env, Box::uniform(2, -2.0, 2.0), 50, 1);
    for (const auto& t : d.transitions()) {
        CHECK((t.s_next - (0.7 * t.s + 0.2 * t.a)).norm() < 1e-14);
        CHECK(t.r == doctest::Approx(-t.s.squaredNorm()));
        CHECK(t.s.cwiseAbs().maxCoeff() <= 2.0);
        CHECK(t.a.cwiseAbs().maxCoeff() <= 1.0);
    }
}

TEST_CASE("behavior dataset has episodes x T transitions")
{
    const auto env = testing::linear_env(2, 16, 0.01);
    const auto d = mdp::generate_behavior_dataset(*env, testing::linear_policy(2, 0.5), 50, 0.1, 3);
    CHECK(d.size() == 800);
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if ((i + 1) % 16 != 0)
            CHECK(d[i].s_next == d[i + 1].s);
}

TEST_CASE("tail calibration split takes the last ceil(f n) indices")
{
    auto d = small_dataset(25, 2);
    d.set_tail_calibration(0.1);
    CHECK(d.calibration_split() == std::vector<std::size_t>{22, 23, 24});
    CHECK(d.training_indices().size() == 22);
    CHECK(d.training_indices().back() == 21);
    CHECK_THROWS(d.set_tail_calibration(1.0));
    CHECK_THROWS(d.set_calibration_split({3, 3}));
    CHECK_THROWS(d.set_calibration_split({25}));
}

TEST_CASE("JSONL round trip is exact and line counted")
{
    auto d = small_dataset(40, 5);
    d.set_tail_calibration(0.1);
    std::stringstream ss;
    mdp::write_jsonl(d, ss);
    const std::string text = ss.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 41);
    std::stringstream in(text);
    const auto back = mdp::read_jsonl(in);
    CHECK(back == d);
    CHECK(back.calibration_split() == d.calibration_split());
}

TEST_CASE("malformed JSONL reports the line")
{
    std::stringstream in("{\"d_s\":1,\"d_a\":1,\"calib_idx\":[]}\n{\"s\":[0],\"a\":[0],\"r\":0}\n");
    try {
        mdp::read_jsonl(in);
        FAIL("expected parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    std::stringstream empty("");
    CHECK_THROWS(mdp::read_jsonl(empty));
}

TEST_CASE("dataset rejects mismatched transitions")
{
    mdp::Dataset d(2, 1);
    CHECK_THROWS(d.add({Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1), 0.0, Eigen::VectorXd::Zero(2)}));
    CHECK_THROWS(d.add({Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1), std::nan(""), Eigen::VectorXd::Zero(2)}));
}

TEST_CASE("delta targets wrap periodic dimensions")
{
    mdp::Dataset d(1, 1);
    d.add({StateVec::Constant(1, 3.0), ActionVec::Zero(1), 0.0, StateVec::Constant(1, -3.0)});
    mdp::StateTopology topo = mdp::StateTopology::euclidean(1);
    topo.periodic[0] = true;
    const Batch delta = mdp::make_targets(d, mdp::TargetMode::Delta, topo);
    CHECK(delta(0, 0) == doctest::Approx(2.0 * std::numbers::pi - 6.0));
    const Batch next = mdp::make_targets(d, mdp::TargetMode::NextState, topo);
    CHECK(next(0, 0) == -3.0);
}

TEST_CASE("expected uncertainty of a constant-sigma model is its norm")
{
    const auto env = testing::linear_env(2, 4, 0.1);
    Eigen::VectorXd sigma(2);
    sigma << 0.3, 0.4;
    const testing::StubModel model(2, 2, 0.9, 0.5, sigma, Eigen::VectorXd::Ones(2), 0.0);
    CHECK(mdp::estimate_expected_uncertainty(model, *env, *testing::linear_policy(2, 0.2), 8, 0) ==
          doctest::Approx(0.5));
}
