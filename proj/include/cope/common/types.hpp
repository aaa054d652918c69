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

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace cope {

using StateVec = Eigen::VectorXd;
using ActionVec = Eigen::VectorXd;
/// Row-per-sample batch of states or actions.
using Batch = Eigen::MatrixXd;

/// Axis-aligned box, one [lo, hi] interval per dimension.
struct Box {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    static Box uniform(int dim, double lo, double hi)
    {
        return Box{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
    }

    int dim() const { return static_cast<int>(lo.size()); }

    Eigen::VectorXd clip(const Eigen::VectorXd& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

    bool contains(const Eigen::VectorXd& x) const
    {
        return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    }
};

/// Raised when a rollout produces a non-finite state.
class RolloutFault : public std::runtime_error {
public:
    RolloutFault(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// Raised when a model cannot be fitted (Cholesky breakdown, diverging training).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) { return m.allFinite(); }

} // namespace cope
