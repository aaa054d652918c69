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

#include "cope/mdp/environment.hpp"

#include <cmath>
#include <numbers>

namespace cope::mdp {

double wrap_angle(double x)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double y = std::fmod(x + std::numbers::pi, two_pi);
    if (y <= 0.0)
        y += two_pi;
    return y - std::numbers::pi;
}

StateTopology StateTopology::euclidean(int dim)
{
    return StateTopology{std::vector<bool>(static_cast<std::size_t>(dim), false),
                         Eigen::VectorXd::Constant(dim, -std::numeric_limits<double>::infinity()),
                         Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::infinity())};
}

bool StateTopology::has_periodic() const
{
    for (bool p : periodic)
        if (p)
            return true;
    return false;
}

void StateTopology::canonicalize(Batch& states) const
{
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
        const bool wrap = periodic[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < states.rows(); ++i) {
            double v = states(i, j);
            if (wrap)
                v = wrap_angle(v);
            states(i, j) = std::min(std::max(v, clip_lo[j]), clip_hi[j]);
        }
    }
}

void StateTopology::canonicalize(StateVec& s) const
{
    for (Eigen::Index j = 0; j < s.size(); ++j) {
        double v = s[j];
        if (periodic[static_cast<std::size_t>(j)])
            v = wrap_angle(v);
        s[j] = std::min(std::max(v, clip_lo[j]), clip_hi[j]);
    }
}

Batch StateTopology::difference(const Batch& next, const Batch& prev) const
{
    Batch d = next - prev;
    for (Eigen::Index j = 0; j < d.cols(); ++j)
        if (periodic[static_cast<std::size_t>(j)])
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                d(i, j) = wrap_angle(d(i, j));
    return d;
}

void Task::validate() const
{
    if (state_dim <= 0 || action_dim <= 0)
        throw std::invalid_argument("task '" + name + "': dimensions must be positive");
    if (horizon < 1)
        throw std::invalid_argument("task '" + name + "': horizon must be >= 1");
    if (action_box.dim() != action_dim)
        throw std::invalid_argument("task '" + name + "': action box dimension mismatch");
    if (!reward || !initial)
        throw std::invalid_argument("task '" + name + "': reward and initial distribution are required");
    if (topology.periodic.size() != static_cast<std::size_t>(state_dim) || topology.clip_lo.size() != state_dim ||
        topology.clip_hi.size() != state_dim)
        throw std::invalid_argument("task '" + name + "': topology dimension mismatch");
}

Environment::Environment(Task task) : task_(std::move(task))
{
    task_.validate();
}

StateVec Environment::step(const StateVec& s, const ActionVec& a, RolloutStreams& streams, int t) const
{
    Batch S = s.transpose();
    Batch A = a.transpose();
    return step_batch(S, A, std::span<RolloutStreams>(&streams, 1), t).row(0).transpose();
}

SimulatedEnvironment::SimulatedEnvironment(Task task, DynamicsFn mean_dynamics, Eigen::VectorXd noise_std)
    : Environment(std::move(task)), mean_dynamics_(std::move(mean_dynamics)), noise_std_(std::move(noise_std))
{
    if (noise_std_.size() != task_.state_dim)
        throw std::invalid_argument("noise std dimension mismatch");
    if ((noise_std_.array() < 0.0).any())
        throw std::invalid_argument("noise std must be nonnegative");
}

StateVec SimulatedEnvironment::mean_dynamics(const StateVec& s, const ActionVec& a) const
{
    return mean_dynamics_(s, a);
}

double SimulatedEnvironment::noise_log_density(const Eigen::VectorXd& eps) const
{
    double lp = 0.0;
    for (Eigen::Index j = 0; j < eps.size(); ++j) {
        const double sd = noise_std_[j];
        if (sd == 0.0) {
            if (eps[j] != 0.0)
                return -std::numeric_limits<double>::infinity();
            continue;
        }
        const double z = eps[j] / sd;
        lp += -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
    }
    return lp;
}

Batch SimulatedEnvironment::step_batch(const Batch& states, const Batch& actions, std::span<RolloutStreams> streams,
                                       int) const
{
    const Eigen::Index n = states.rows();
    Batch next(n, task_.state_dim);
#pragma omp parallel for schedule(static) if (n > 256)
    for (Eigen::Index i = 0; i < n; ++i) {
        StateVec s_next = mean_dynamics_(states.row(i).transpose(), actions.row(i).transpose());
        Rng& rng = streams[static_cast<std::size_t>(i)].main;
        for (Eigen::Index j = 0; j < s_next.size(); ++j)
            s_next[j] += noise_std_[j] * rng.normal();
        task_.topology.canonicalize(s_next);
        next.row(i) = s_next.transpose();
    }
    return next;
}

} // namespace cope::mdp
