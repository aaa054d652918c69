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

#include "cope/common/types.hpp"

#include <memory>
#include <vector>

namespace cope::hambo {

/// eta: S x A -> [-1, 1]^{d_s}, evaluated on a batch of (s, a) rows.
class ContinuousAdversary {
public:
    virtual ~ContinuousAdversary() = default;
    virtual Batch eta(const Batch& states, const Batch& actions) const = 0;
};

/// theta(. | s, a): a probability vector over the K ensemble members per row.
class DiscreteAdversary {
public:
    virtual ~DiscreteAdversary() = default;
    virtual Batch probabilities(const Batch& states, const Batch& actions) const = 0;
};

/// eta == c for every input.
class ConstantAdversary final : public ContinuousAdversary {
public:
    explicit ConstantAdversary(Eigen::VectorXd value);
    Batch eta(const Batch& states, const Batch& actions) const override;

private:
    Eigen::VectorXd value_;
};

/// eta = tanh(MLP([s a] / input_scale)) with tanh hidden units; no hidden layers gives tanh(W x + b).
class MLPAdversary final : public ContinuousAdversary {
public:
    MLPAdversary(std::vector<int> widths, Eigen::VectorXd params, Eigen::VectorXd input_scale);
    Batch eta(const Batch& states, const Batch& actions) const override;

    static Eigen::Index num_params(const std::vector<int>& widths);

private:
    std::vector<int> widths_;
    Eigen::VectorXd params_;
    Eigen::VectorXd input_scale_;
};

/// Piecewise-constant table over a box of (s, a) inputs; points outside the
/// box use the nearest cell. Table entries are clamped to [-1, 1].
class GridAdversary final : public ContinuousAdversary {
public:
    GridAdversary(Eigen::VectorXd lo, Eigen::VectorXd hi, std::vector<int> cells, int state_dim,
                  Eigen::VectorXd table);
    Batch eta(const Batch& states, const Batch& actions) const override;

    /// Row-major cell index of input x.
    Eigen::Index cell_of(const Eigen::VectorXd& x) const;
    Eigen::Index num_cells() const;

private:
    Eigen::VectorXd lo_;
    Eigen::VectorXd hi_;
    std::vector<int> cells_;
    int state_dim_;
    Eigen::VectorXd table_;
};

/// Softmax of linear logits W ([s a] / input_scale) + b.
class SoftmaxAdversary final : public DiscreteAdversary {
public:
    SoftmaxAdversary(int members, Eigen::VectorXd params, Eigen::VectorXd input_scale);
    Batch probabilities(const Batch& states, const Batch& actions) const override;

    static Eigen::Index num_params(int input_dim, int members) { return static_cast<Eigen::Index>(members) * (input_dim + 1); }

private:
    int members_;
    Eigen::VectorXd params_;
    Eigen::VectorXd input_scale_;
};

/// Point mass on one member.
class PointMassAdversary final : public DiscreteAdversary {
public:
    PointMassAdversary(int members, int k);
    Batch probabilities(const Batch& states, const Batch& actions) const override;

private:
    int members_;
    int k_;
};

/// Parameterization of continuous adversaries searched by the optimizer.
struct AdversarySpec {
    enum class Kind { MLP, Grid };
    Kind kind = Kind::MLP;
    /// MLP hidden widths; empty means eta = tanh(W x + b).
    std::vector<int> hidden;
    /// Divisor of the (s, a) input; empty means ones.
    Eigen::VectorXd input_scale;
    /// MLP parameter bounds [-param_bound, param_bound].
    double param_bound = 5.0;
    /// Grid box over (s, a) and cells per input dimension.
    Eigen::VectorXd grid_lo;
    Eigen::VectorXd grid_hi;
    std::vector<int> grid_cells;

    Eigen::Index num_params(int d_s, int d_a) const;
    Eigen::VectorXd null_params(int d_s, int d_a) const { return Eigen::VectorXd::Zero(num_params(d_s, d_a)); }
    Box bounds(int d_s, int d_a) const;
    std::shared_ptr<const ContinuousAdversary> make(const Eigen::VectorXd& params, int d_s, int d_a) const;
};

/// Parameterization of discrete adversaries: softmax-linear logits.
struct DiscreteAdversarySpec {
    Eigen::VectorXd input_scale;
    double param_bound = 10.0;

    Eigen::Index num_params(int d_s, int d_a, int members) const;
    Eigen::VectorXd null_params(int d_s, int d_a, int members) const
    {
        return Eigen::VectorXd::Zero(num_params(d_s, d_a, members));
    }
    Box bounds(int d_s, int d_a, int members) const;
    /// Logits +bound for member k and -bound for the others, no state dependence.
    Eigen::VectorXd constant_member_params(int d_s, int d_a, int members, int k) const;
    std::shared_ptr<const DiscreteAdversary> make(const Eigen::VectorXd& params, int d_s, int d_a, int members) const;
};

} // namespace cope::hambo
