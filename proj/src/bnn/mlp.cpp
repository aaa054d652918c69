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

#include "cope/bnn/mlp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cope::bnn {

namespace {

using MatMap = Eigen::Map<const Eigen::MatrixXd>;
using VecMap = Eigen::Map<const Eigen::VectorXd>;

struct Layer {
    Eigen::Index offset; // of the weight block
    int in;
    int out;
};

std::vector<Layer> layers(const MLPArch& arch)
{
    const std::vector<int> w = arch.widths();
    std::vector<Layer> out;
    Eigen::Index off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        out.push_back(Layer{off, w[l], w[l + 1]});
        off += static_cast<Eigen::Index>(w[l]) * w[l + 1] + w[l + 1];
    }
    return out;
}

// Pre-activations of every layer plus the post-ReLU hidden activations.
struct Tape {
    std::vector<Eigen::MatrixXd> act; // act[0] = X, act[l] = relu(pre[l-1]) for hidden layers
    Eigen::MatrixXd out;              // final linear output
};

Tape run(const MLPArch& arch, const std::vector<Layer>& ls, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X)
{
    if (theta.size() != arch.num_params())
        throw std::invalid_argument("mlp: parameter vector has wrong size");
    if (X.cols() != arch.input_dim)
        throw std::invalid_argument("mlp: input dimension mismatch");
    Tape tape;
    tape.act.reserve(ls.size());
    tape.act.push_back(X);
    for (std::size_t l = 0; l < ls.size(); ++l) {
        const Layer& L = ls[l];
        const MatMap W(theta.data() + L.offset, L.out, L.in);
        const VecMap b(theta.data() + L.offset + static_cast<Eigen::Index>(L.out) * L.in, L.out);
        Eigen::MatrixXd Z = tape.act.back() * W.transpose();
        Z.rowwise() += b.transpose();
        if (l + 1 < ls.size())
            tape.act.push_back(Z.cwiseMax(0.0));
        else
            tape.out = std::move(Z);
    }
    return tape;
}

} // namespace

std::vector<int> MLPArch::widths() const
{
    std::vector<int> w{input_dim};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(output_dim());
    return w;
}

Eigen::Index MLPArch::num_params() const
{
    const std::vector<int> w = widths();
    Eigen::Index n = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l)
        n += static_cast<Eigen::Index>(w[l]) * w[l + 1] + w[l + 1];
    return n;
}

void MLPArch::validate() const
{
    if (input_dim < 1 || target_dim < 1)
        throw std::invalid_argument("mlp: input and target dimensions must be >= 1");
    for (int h : hidden)
        if (h < 1)
            throw std::invalid_argument("mlp: hidden widths must be >= 1");
}

double softplus(double x)
{
    return x > 30.0 ? x : std::log1p(std::exp(x));
}

double sigmoid(double x)
{
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

MLPOutput mlp_forward(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X)
{
    const Tape tape = run(arch, layers(arch), theta, X);
    const int d = arch.target_dim;
    MLPOutput out{tape.out.leftCols(d), tape.out.rightCols(d).unaryExpr([](double r) {
                      const double s = softplus(r) + kStdFloor;
                      return s * s;
                  })};
    if (!out.mean.allFinite() || !out.var.allFinite())
        throw std::runtime_error("mlp: non-finite output");
    return out;
}

double log_likelihood(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, Eigen::VectorXd* grad)
{
    const std::vector<Layer> ls = layers(arch);
    const Tape tape = run(arch, ls, theta, X);
    const int d = arch.target_dim;
    if (Y.rows() != X.rows() || Y.cols() != d)
        throw std::invalid_argument("mlp: target shape mismatch");

    const Eigen::Index B = X.rows();
    Eigen::MatrixXd dout(B, 2 * d);
    double ll = 0.0;
    const double log2pi = std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < B; ++i)
        for (int j = 0; j < d; ++j) {
            const double raw = tape.out(i, d + j);
            const double sd = softplus(raw) + kStdFloor;
            const double v = sd * sd;
            const double r = Y(i, j) - tape.out(i, j);
            ll += -0.5 * (log2pi + std::log(v)) - 0.5 * r * r / v;
            dout(i, j) = r / v;
            const double dv = -0.5 / v + 0.5 * r * r / (v * v);
            dout(i, d + j) = dv * 2.0 * sd * sigmoid(raw);
        }
    if (!grad)
        return ll;

    grad->setZero(theta.size());
    Eigen::MatrixXd dZ = std::move(dout);
    for (std::size_t l = ls.size(); l-- > 0;) {
        const Layer& L = ls[l];
        const Eigen::MatrixXd& H = tape.act[l];
        Eigen::Map<Eigen::MatrixXd> dW(grad->data() + L.offset, L.out, L.in);
        Eigen::Map<Eigen::VectorXd> db(grad->data() + L.offset + static_cast<Eigen::Index>(L.out) * L.in, L.out);
        dW.noalias() = dZ.transpose() * H;
        db = dZ.colwise().sum().transpose();
        if (l == 0)
            break;
        const MatMap W(theta.data() + L.offset, L.out, L.in);
        Eigen::MatrixXd dH = dZ * W;
        dZ = (H.array() > 0.0).select(dH, 0.0);
    }
    return ll;
}

double log_prior(const Eigen::VectorXd& theta, Eigen::VectorXd* grad)
{
    if (grad)
        *grad = -theta;
    return -0.5 * theta.squaredNorm() - 0.5 * static_cast<double>(theta.size()) * std::log(2.0 * std::numbers::pi);
}

double log_posterior(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::MatrixXd& X,
                     const Eigen::MatrixXd& Y, double prior_temp, double likelihood_scale, Eigen::VectorXd* grad)
{
    double value = likelihood_scale * log_likelihood(arch, theta, X, Y, grad);
    if (grad)
        *grad *= likelihood_scale;
    if (prior_temp != 0.0) {
        Eigen::VectorXd gp;
        value += prior_temp * log_prior(theta, grad ? &gp : nullptr);
        if (grad)
            *grad += prior_temp * gp;
    }
    return value;
}

Eigen::VectorXd init_params(const MLPArch& arch, Rng& rng)
{
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(arch.num_params());
    for (const Layer& L : layers(arch)) {
        const double sd = std::sqrt(2.0 / L.in);
        const Eigen::Index nw = static_cast<Eigen::Index>(L.in) * L.out;
        for (Eigen::Index i = 0; i < nw; ++i)
            theta[L.offset + i] = sd * rng.normal();
    }
    return theta;
}

} // namespace cope::bnn
