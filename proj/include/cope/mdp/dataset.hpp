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

#include "cope/mdp/environment.hpp"
#include "cope/mdp/policy.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace cope::mdp {

struct Transition {
    StateVec s;
    ActionVec a;
    double r = 0.0;
    StateVec s_next;
};

/// Offline transitions D_b with an optional withheld calibration split D_c.
class Dataset {
public:
    Dataset(int state_dim, int action_dim);

    int state_dim() const { return d_s_; }
    int action_dim() const { return d_a_; }
    std::size_t size() const { return transitions_.size(); }
    bool empty() const { return transitions_.empty(); }

    const std::vector<Transition>& transitions() const { return transitions_; }
    const Transition& operator[](std::size_t i) const { return transitions_[i]; }
    const std::vector<std::size_t>& calibration_split() const { return calibration_; }

    void add(Transition t);
    void set_calibration_split(std::vector<std::size_t> indices);
    /// Reserves the last ceil(fraction * n) indices as the calibration split.
    void set_tail_calibration(double fraction);

    /// Indices not in the calibration split, in order.
    std::vector<std::size_t> training_indices() const;
    Dataset subset(const std::vector<std::size_t>& indices) const;
    /// First n transitions (calibration split dropped).
    Dataset prefix(std::size_t n) const;

    /// n x (d_s + d_a) matrix of concatenated (s, a).
    Batch inputs() const;
    Batch states() const;
    Batch actions() const;
    Batch next_states() const;

    bool operator==(const Dataset& other) const;

private:
    void check(const Transition& t) const;

    int d_s_;
    int d_a_;
    std::vector<Transition> transitions_;
    std::vector<std::size_t> calibration_;
};

/// JSON Lines: a header {"d_s","d_a","calib_idx"} then one {"s","a","r","sp"} per transition.
void write_jsonl(const Dataset& data, std::ostream& out);
void write_jsonl(const Dataset& data, const std::filesystem::path& path);
Dataset read_jsonl(std::istream& in);
Dataset read_jsonl(const std::filesystem::path& path);

/// Rolls out `behavior` with Gaussian action noise for `episodes` episodes.
/// Episode e uses RolloutStreams::for_rollout(seed, e).
Dataset generate_behavior_dataset(const Environment& env, std::shared_ptr<const Policy> behavior,
                                  std::size_t episodes, double action_noise_std, std::uint64_t seed);

/// n transitions with s ~ U(state_box), a ~ U(action box), s' from the environment.
/// Sample i depends only on (seed, i), so smaller n gives a prefix.
Dataset generate_uniform_dataset(const Environment& env, const Box& state_box, std::size_t n, std::uint64_t seed);

} // namespace cope::mdp
