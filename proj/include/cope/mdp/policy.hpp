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

#include "cope/common/rng.hpp"
#include "cope/common/types.hpp"

#include <functional>
#include <memory>

namespace cope::mdp {

/// pi(a | s). Implementations are immutable; sampling randomness comes from the caller.
class Policy {
public:
    virtual ~Policy() = default;
    virtual ActionVec act(const StateVec& s, Rng& rng) const = 0;
    virtual bool deterministic() const { return false; }
};

/// Deterministic map s -> a, clipped to the action box.
class DeterministicPolicy final : public Policy {
public:
    using Fn = std::function<ActionVec(const StateVec&)>;

    DeterministicPolicy(Fn fn, Box box) : fn_(std::move(fn)), box_(std::move(box)) {}

    ActionVec act(const StateVec& s, Rng&) const override { return box_.clip(fn_(s)); }
    ActionVec operator()(const StateVec& s) const { return box_.clip(fn_(s)); }
    bool deterministic() const override { return true; }

private:
    Fn fn_;
    Box box_;
};

/// Base policy plus isotropic Gaussian action noise, clipped to the action box.
class GaussianNoisePolicy final : public Policy {
public:
    GaussianNoisePolicy(std::shared_ptr<const Policy> base, double noise_std, Box box);

    ActionVec act(const StateVec& s, Rng& rng) const override;
    bool deterministic() const override { return noise_std_ == 0.0 && base_->deterministic(); }

private:
    std::shared_ptr<const Policy> base_;
    double noise_std_;
    Box box_;
};

} // namespace cope::mdp
