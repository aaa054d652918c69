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

#include "cope/hambo/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cope::hambo {

namespace {

Eigen::MatrixXd joined(const Batch& states, const Batch& actions, const Eigen::VectorXd& scale)
{
    if (states.rows() != actions.rows())
        throw std::invalid_argument("adversary: state and action batches differ in length");
    Eigen::MatrixXd X(states.rows(), states.cols() + actions.cols());
    X << states, actions;
    if (scale.size() == 0)
        return X;
    if (scale.size() != X.cols())
        throw std::invalid_argument("adversary: input_scale dimension mismatch");
    return X.array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd ones_if_empty(Eigen::VectorXd v, Eigen::Index n)
{
    return v.size() == 0 ? Eigen::VectorXd::Ones(n) : v;
}

} // namespace

ConstantAdversary::ConstantAdversary(Eigen::VectorXd value) : value_(value.cwiseMax(-1.0).cwiseMin(1.0)) {}

Batch ConstantAdversary::eta(const Batch& states, const Batch&) const
{
    return value_.transpose().replicate(states.rows(), 1);
}

MLPAdversary::MLPAdversary(std::vector<int> widths, Eigen::VectorXd params, Eigen::VectorXd input_scale)
    : widths_(std::move(widths)), params_(std::move(params)), input_scale_(std::move(input_scale))
{
    if (widths_.size() < 2 || params_.size() != num_params(widths_))
        throw std::invalid_argument("MLPAdversary: parameter vector does not match the architecture");
}

Eigen::Index MLPAdversary::num_params(const std::vector<int>& widths)
{
    Eigen::Index n = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l)
        n += static_cast<Eigen::Index>(widths[l]) * widths[l + 1] + widths[l + 1];
    return n;
}

Batch MLPAdversary::eta(const Batch& states, const Batch& actions) const
{
    Eigen::MatrixXd H = joined(states, actions, input_scale_);
    if (H.cols() != widths_.front())
        throw std::invalid_argument("MLPAdversary: input dimension mismatch");
    Eigen::Index off = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        const int in = widths_[l], out = widths_[l + 1];
        const Eigen::Map<const Eigen::MatrixXd> W(params_.data() + off, out, in);
        const Eigen::Map<const Eigen::VectorXd> b(params_.data() + off + static_cast<Eigen::Index>(out) * in, out);
        off += static_cast<Eigen::Index>(out) * in + out;
        Eigen::MatrixXd Z = H * W.transpose();
        Z.rowwise() += b.transpose();
        H = Z.array().tanh();
    }
    return H;
}

GridAdversary::GridAdversary(Eigen::VectorXd lo, Eigen::VectorXd hi, std::vector<int> cells, int state_dim,
                             Eigen::VectorXd table)
    : lo_(std::move(lo)), hi_(std::move(hi)), cells_(std::move(cells)), state_dim_(state_dim),
      table_(table.cwiseMax(-1.0).cwiseMin(1.0))
{
    if (lo_.size() != hi_.size() || static_cast<std::size_t>(lo_.size()) != cells_.size())
        throw std::invalid_argument("GridAdversary: box and cell counts differ in dimension");
    for (std::size_t j = 0; j < cells_.size(); ++j)
        if (cells_[j] < 1 || !(hi_[static_cast<Eigen::Index>(j)] > lo_[static_cast<Eigen::Index>(j)]))
            throw std::invalid_argument("GridAdversary: need >= 1 cell and lo < hi per dimension");
    if (table_.size() != num_cells() * state_dim_)
        throw std::invalid_argument("GridAdversary: table size must be cells * d_s");
}

Eigen::Index GridAdversary::num_cells() const
{
    Eigen::Index n = 1;
    for (int c : cells_)
        n *= c;
    return n;
}

Eigen::Index GridAdversary::cell_of(const Eigen::VectorXd& x) const
{
    Eigen::Index idx = 0;
    for (std::size_t j = 0; j < cells_.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        const double u = (x[jj] - lo_[jj]) / (hi_[jj] - lo_[jj]);
        const int c = std::clamp(static_cast<int>(std::floor(u * cells_[j])), 0, cells_[j] - 1);
        idx = idx * cells_[j] + c;
    }
    return idx;
}

Batch GridAdversary::eta(const Batch& states, const Batch& actions) const
{
    const Eigen::MatrixXd X = joined(states, actions, Eigen::VectorXd());
    if (X.cols() != lo_.size())
        throw std::invalid_argument("GridAdversary: input dimension mismatch");
    Batch out(X.rows(), state_dim_);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out.row(i) = table_.segment(cell_of(X.row(i).transpose()) * state_dim_, state_dim_).transpose();
    return out;
}

SoftmaxAdversary::SoftmaxAdversary(int members, Eigen::VectorXd params, Eigen::VectorXd input_scale)
    : members_(members), params_(std::move(params)), input_scale_(std::move(input_scale))
{
    if (members_ < 1)
        throw std::invalid_argument("SoftmaxAdversary: need >= 1 member");
}

Batch SoftmaxAdversary::probabilities(const Batch& states, const Batch& actions) const
{
    const Eigen::MatrixXd X = joined(states, actions, input_scale_);
    const auto d = static_cast<int>(X.cols());
    if (params_.size() != num_params(d, members_))
        throw std::invalid_argument("SoftmaxAdversary: parameter vector does not match the input dimension");
    const Eigen::Map<const Eigen::MatrixXd> W(params_.data(), members_, d);
    const Eigen::Map<const Eigen::VectorXd> b(params_.data() + static_cast<Eigen::Index>(members_) * d, members_);
    Eigen::MatrixXd Z = X * W.transpose();
    Z.rowwise() += b.transpose();
    for (Eigen::Index i = 0; i < Z.rows(); ++i) {
        const double m = Z.row(i).maxCoeff();
        Z.row(i) = (Z.row(i).array() - m).exp();
        Z.row(i) /= Z.row(i).sum();
    }
    return Z;
}

PointMassAdversary::PointMassAdversary(int members, int k) : members_(members), k_(k)
{
    if (k_ < 0 || k_ >= members_)
        throw std::invalid_argument("PointMassAdversary: member index out of range");
}

Batch PointMassAdversary::probabilities(const Batch& states, const Batch&) const
{
    Batch p = Batch::Zero(states.rows(), members_);
    p.col(k_).setOnes();
    return p;
}

Eigen::Index AdversarySpec::num_params(int d_s, int d_a) const
{
    if (kind == Kind::Grid) {
        if (grid_cells.size() != static_cast<std::size_t>(d_s + d_a))
            throw std::invalid_argument("adversary grid needs one cell count per (s, a) dimension");
        Eigen::Index n = d_s;
        for (int c : grid_cells)
            n *= c;
        return n;
    }
    std::vector<int> w{d_s + d_a};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(d_s);
    return MLPAdversary::num_params(w);
}

Box AdversarySpec::bounds(int d_s, int d_a) const
{
    const double b = kind == Kind::Grid ? 1.0 : param_bound;
    return Box::uniform(static_cast<int>(num_params(d_s, d_a)), -b, b);
}

std::shared_ptr<const ContinuousAdversary> AdversarySpec::make(const Eigen::VectorXd& params, int d_s, int d_a) const
{
    if (kind == Kind::Grid)
        return std::make_shared<const GridAdversary>(grid_lo, grid_hi, grid_cells, d_s, params);
    std::vector<int> w{d_s + d_a};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(d_s);
    return std::make_shared<const MLPAdversary>(std::move(w), params, ones_if_empty(input_scale, d_s + d_a));
}

Eigen::Index DiscreteAdversarySpec::num_params(int d_s, int d_a, int members) const
{
    return SoftmaxAdversary::num_params(d_s + d_a, members);
}

Box DiscreteAdversarySpec::bounds(int d_s, int d_a, int members) const
{
    return Box::uniform(static_cast<int>(num_params(d_s, d_a, members)), -param_bound, param_bound);
}

Eigen::VectorXd DiscreteAdversarySpec::constant_member_params(int d_s, int d_a, int members, int k) const
{
    Eigen::VectorXd p = Eigen::VectorXd::Zero(num_params(d_s, d_a, members));
    const Eigen::Index bias = static_cast<Eigen::Index>(members) * (d_s + d_a);
    p.segment(bias, members).setConstant(-param_bound);
    p[bias + k] = param_bound;
    return p;
}

std::shared_ptr<const DiscreteAdversary> DiscreteAdversarySpec::make(const Eigen::VectorXd& params, int d_s, int d_a,
                                                                     int members) const
{
    return std::make_shared<const SoftmaxAdversary>(members, params, ones_if_empty(input_scale, d_s + d_a));
}

} // namespace cope::hambo
