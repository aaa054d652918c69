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

#include "cope/mdp/dataset.hpp"

#include "cope/mdp/rollout.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cope::mdp {

using nlohmann::json;

Dataset::Dataset(int state_dim, int action_dim) : d_s_(state_dim), d_a_(action_dim)
{
    if (d_s_ <= 0 || d_a_ <= 0)
        throw std::invalid_argument("Dataset: dimensions must be positive");
}

void Dataset::check(const Transition& t) const
{
    if (t.s.size() != d_s_ || t.s_next.size() != d_s_ || t.a.size() != d_a_)
        throw std::invalid_argument("Dataset: transition dimension mismatch");
    if (!t.s.allFinite() || !t.s_next.allFinite() || !t.a.allFinite() || !std::isfinite(t.r))
        throw std::invalid_argument("Dataset: non-finite transition");
}

void Dataset::add(Transition t)
{
    check(t);
    transitions_.push_back(std::move(t));
}

void Dataset::set_calibration_split(std::vector<std::size_t> indices)
{
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw std::invalid_argument("Dataset: duplicate calibration index");
    if (!indices.empty() && indices.back() >= transitions_.size())
        throw std::out_of_range("Dataset: calibration index out of range");
    calibration_ = std::move(indices);
}

void Dataset::set_tail_calibration(double fraction)
{
    if (!(fraction >= 0.0 && fraction < 1.0))
        throw std::invalid_argument("Dataset: calibration fraction must be in [0, 1)");
    const auto n = transitions_.size();
    const auto k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    std::vector<std::size_t> idx;
    for (std::size_t i = n - k; i < n; ++i)
        idx.push_back(i);
    calibration_ = std::move(idx);
}

std::vector<std::size_t> Dataset::training_indices() const
{
    std::vector<std::size_t> out;
    out.reserve(transitions_.size() - calibration_.size());
    std::size_t c = 0;
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
        if (c < calibration_.size() && calibration_[c] == i) {
            ++c;
            continue;
        }
        out.push_back(i);
    }
    return out;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const
{
    Dataset out(d_s_, d_a_);
    out.transitions_.reserve(indices.size());
    for (std::size_t i : indices)
        out.transitions_.push_back(transitions_.at(i));
    return out;
}

Dataset Dataset::prefix(std::size_t n) const
{
    if (n > transitions_.size())
        throw std::out_of_range("Dataset::prefix: n exceeds dataset size");
    Dataset out(d_s_, d_a_);
    out.transitions_.assign(transitions_.begin(), transitions_.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

Batch Dataset::inputs() const
{
    Batch X(static_cast<Eigen::Index>(size()), d_s_ + d_a_);
    for (std::size_t i = 0; i < size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        X.row(r).head(d_s_) = transitions_[i].s.transpose();
        X.row(r).tail(d_a_) = transitions_[i].a.transpose();
    }
    return X;
}

Batch Dataset::states() const
{
    Batch X(static_cast<Eigen::Index>(size()), d_s_);
    for (std::size_t i = 0; i < size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) = transitions_[i].s.transpose();
    return X;
}

Batch Dataset::actions() const
{
    Batch X(static_cast<Eigen::Index>(size()), d_a_);
    for (std::size_t i = 0; i < size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) = transitions_[i].a.transpose();
    return X;
}

Batch Dataset::next_states() const
{
    Batch X(static_cast<Eigen::Index>(size()), d_s_);
    for (std::size_t i = 0; i < size(); ++i)
        X.row(static_cast<Eigen::Index>(i)) = transitions_[i].s_next.transpose();
    return X;
}

bool Dataset::operator==(const Dataset& other) const
{
    if (d_s_ != other.d_s_ || d_a_ != other.d_a_ || calibration_ != other.calibration_ || size() != other.size())
        return false;
    for (std::size_t i = 0; i < size(); ++i) {
        const auto& x = transitions_[i];
        const auto& y = other.transitions_[i];
        if (x.s != y.s || x.a != y.a || x.r != y.r || x.s_next != y.s_next)
            return false;
    }
    return true;
}

namespace {

json to_json_array(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd from_json_array(const json& j, int expected, const char* field, std::size_t line)
{
    const auto v = j.at(field).get<std::vector<double>>();
    if (static_cast<int>(v.size()) != expected)
        throw std::runtime_error("dataset line " + std::to_string(line) + ": field '" + field +
                                 "' has wrong length");
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

void write_jsonl(const Dataset& data, std::ostream& out)
{
    out << json{{"d_s", data.state_dim()}, {"d_a", data.action_dim()}, {"calib_idx", data.calibration_split()}}.dump()
        << '\n';
    for (const auto& t : data.transitions())
        out << json{{"s", to_json_array(t.s)}, {"a", to_json_array(t.a)}, {"r", t.r}, {"sp", to_json_array(t.s_next)}}
                   .dump()
            << '\n';
    if (!out)
        throw std::runtime_error("write_jsonl: stream error");
}

void write_jsonl(const Dataset& data, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    write_jsonl(data, out);
}

Dataset read_jsonl(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("dataset: missing header line");
    json header;
    try {
        header = json::parse(line);
        header.at("d_s").get<int>();
        header.at("d_a").get<int>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("dataset line 1: ") + e.what());
    }
    Dataset data(header.at("d_s").get<int>(), header.at("d_a").get<int>());
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        try {
            const json row = json::parse(line);
            data.add(Transition{from_json_array(row, data.state_dim(), "s", lineno),
                                from_json_array(row, data.action_dim(), "a", lineno), row.at("r").get<double>(),
                                from_json_array(row, data.state_dim(), "sp", lineno)});
        } catch (const json::exception& e) {
            throw std::runtime_error("dataset line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    data.set_calibration_split(header.value("calib_idx", std::vector<std::size_t>{}));
    return data;
}

Dataset read_jsonl(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open dataset '" + path.string() + "'");
    try {
        return read_jsonl(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

Dataset generate_behavior_dataset(const Environment& env, std::shared_ptr<const Policy> behavior,
                                  std::size_t episodes, double action_noise_std, std::uint64_t seed)
{
    if (!(action_noise_std >= 0.0))
        throw std::invalid_argument("generate_behavior_dataset: noise std must be >= 0");
    const GaussianNoisePolicy noisy(std::move(behavior), action_noise_std, env.action_box());
    Dataset data(env.state_dim(), env.action_dim());
    for (std::size_t e = 0; e < episodes; ++e) {
        RolloutStreams streams = RolloutStreams::for_rollout(seed, e);
        const Trajectory tr = rollout(env, noisy, streams);
        for (int t = 0; t < tr.length(); ++t) {
            const auto k = static_cast<std::size_t>(t);
            data.add(Transition{tr.states[k], tr.actions[k], tr.rewards[k], tr.states[k + 1]});
        }
    }
    return data;
}

Dataset generate_uniform_dataset(const Environment& env, const Box& state_box, std::size_t n, std::uint64_t seed)
{
    if (n == 0)
        throw std::invalid_argument("generate_uniform_dataset: n must be >= 1");
    if (state_box.dim() != env.state_dim() || !state_box.lo.allFinite() || !state_box.hi.allFinite())
        throw std::invalid_argument("generate_uniform_dataset: state box must be finite and match d_s");
    const Box& abox = env.action_box();
    const std::uint64_t step_seed = derive_seed(seed, 4, 0);
    Dataset data(env.state_dim(), env.action_dim());
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(derive_seed(seed, 3, i));
        StateVec s(env.state_dim());
        for (int j = 0; j < env.state_dim(); ++j)
            s[j] = rng.uniform(state_box.lo[j], state_box.hi[j]);
        ActionVec a(env.action_dim());
        for (int j = 0; j < env.action_dim(); ++j)
            a[j] = rng.uniform(abox.lo[j], abox.hi[j]);
        RolloutStreams streams = RolloutStreams::for_rollout(step_seed, i);
        StateVec sp = env.step(s, a, streams, 0);
        data.add(Transition{s, a, env.reward(s, a), sp});
    }
    return data;
}

} // namespace cope::mdp
