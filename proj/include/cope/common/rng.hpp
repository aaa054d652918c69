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

#include <cstdint>
#include <random>

namespace cope {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a root seed.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `tag` for a given root seed.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag, std::uint64_t index)
{
    return splitmix64(splitmix64(splitmix64(root) ^ (tag + 0x51ED27A3ULL)) ^ index);
}

/// Seeded random stream. Every draw is a deterministic function of the seed and
/// the sequence of calls made on this object.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double normal(double mean, double std) { return mean + std * normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// The random streams owned by one rollout. `main` drives the initial state,
/// the policy and transition noise; `aux` drives adversary/member sampling so that
/// transition noise stays aligned across environments that differ only in how
/// they pick a model. `episode_key` is a stable per-episode value.
struct RolloutStreams {
    Rng main;
    Rng aux;
    std::uint64_t episode_key = 0;

    static RolloutStreams for_rollout(std::uint64_t seed, std::uint64_t index)
    {
        return RolloutStreams{Rng(derive_seed(seed, 0, index)), Rng(derive_seed(seed, 1, index)),
                              derive_seed(seed, 2, index)};
    }
};

} // namespace cope
