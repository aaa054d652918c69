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

#include "cope/bnn/ensemble.hpp"

#include "cope/bnn/calibration.hpp"
#include "cope/bnn/svgd.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cope::bnn {

using nlohmann::json;

Normalizer Normalizer::fit(const Eigen::MatrixXd& X)
{
    Normalizer n;
    const auto rows = static_cast<double>(X.rows());
    n.mean = X.colwise().mean().transpose();
    n.std = ((X.rowwise() - n.mean.transpose()).colwise().squaredNorm().transpose() / rows).cwiseSqrt();
    for (Eigen::Index j = 0; j < n.std.size(); ++j)
        if (!(n.std[j] >= 1e-8))
            n.std[j] = 1.0;
    return n;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& X) const
{
    return (X.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

double PredictiveMixture::log_density(Eigen::Index row, const Eigen::VectorXd& y) const
{
    const std::size_t K = member_mean.size();
    std::vector<double> terms(K);
    const double log2pi = std::log(2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < K; ++k) {
        double lp = 0.0;
        for (Eigen::Index j = 0; j < y.size(); ++j) {
            const double v = member_var[k](row, j);
            const double r = y[j] - member_mean[k](row, j);
            lp += -0.5 * (log2pi + std::log(v)) - 0.5 * r * r / v;
        }
        terms[k] = lp;
    }
    const double m = *std::max_element(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms)
        s += std::exp(t - m);
    return m + std::log(s / static_cast<double>(K));
}

PredictiveMixture make_mixture(std::vector<Eigen::MatrixXd> member_mean, std::vector<Eigen::MatrixXd> member_var)
{
    if (member_mean.empty() || member_mean.size() != member_var.size())
        throw std::invalid_argument("make_mixture: need matching, nonempty member lists");
    PredictiveMixture mix;
    const auto K = static_cast<double>(member_mean.size());
    mix.mean = Eigen::MatrixXd::Zero(member_mean[0].rows(), member_mean[0].cols());
    mix.aleatoric_var = mix.mean;
    mix.epistemic_var = mix.mean;
    for (std::size_t k = 0; k < member_mean.size(); ++k) {
        mix.mean += member_mean[k];
        mix.aleatoric_var += member_var[k];
    }
    mix.mean /= K;
    mix.aleatoric_var /= K;
    for (const auto& h : member_mean)
        mix.epistemic_var += (h - mix.mean).cwiseAbs2();
    mix.epistemic_var /= K;
    mix.member_mean = std::move(member_mean);
    mix.member_var = std::move(member_var);
    return mix;
}

Ensemble::Ensemble(MLPArch arch, std::vector<Eigen::VectorXd> particles, Normalizer input_norm,
                   Normalizer target_norm, mdp::TargetMode target, double prior_temp)
    : arch_(std::move(arch)), particles_(std::move(particles)), input_norm_(std::move(input_norm)),
      target_norm_(std::move(target_norm)), target_(target), prior_temp_(prior_temp),
      calib_tau_(Eigen::VectorXd::Ones(arch_.target_dim))
{
    arch_.validate();
    if (particles_.empty())
        throw std::invalid_argument("ensemble: need at least one particle");
    for (const auto& p : particles_)
        if (p.size() != arch_.num_params() || !p.allFinite())
            throw std::invalid_argument("ensemble: particle has wrong size or non-finite entries");
    if (input_norm_.mean.size() != arch_.input_dim || input_norm_.std.size() != arch_.input_dim ||
        target_norm_.mean.size() != arch_.target_dim || target_norm_.std.size() != arch_.target_dim)
        throw std::invalid_argument("ensemble: normalizer dimension mismatch");
    if (!(input_norm_.std.array() > 0.0).all() || !(target_norm_.std.array() > 0.0).all())
        throw std::invalid_argument("ensemble: normalizer std must be > 0");
}

void Ensemble::set_calib_tau(Eigen::VectorXd tau)
{
    if (tau.size() != arch_.target_dim || !(tau.array() > 0.0).all())
        throw std::invalid_argument("ensemble: calib_tau must have d_s positive entries");
    calib_tau_ = std::move(tau);
}

namespace {

double mean_validation_ll(const MLPArch& arch, const std::vector<Eigen::VectorXd>& particles,
                          const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y)
{
    std::vector<Eigen::MatrixXd> means;
    std::vector<Eigen::MatrixXd> vars;
    for (const auto& p : particles) {
        MLPOutput out = mlp_forward(arch, p, X);
        means.push_back(std::move(out.mean));
        vars.push_back(std::move(out.var));
    }
    const PredictiveMixture mix = make_mixture(std::move(means), std::move(vars));
    double s = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        s += mix.log_density(i, Y.row(i).transpose());
    return s / static_cast<double>(X.rows());
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& M, const std::vector<Eigen::Index>& idx, std::size_t begin,
                          std::size_t end)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(end - begin), M.cols());
    for (std::size_t i = begin; i < end; ++i)
        out.row(static_cast<Eigen::Index>(i - begin)) = M.row(idx[i]);
    return out;
}

} // namespace

Ensemble Ensemble::train(const mdp::Dataset& data, const SVGDConfig& cfg, const mdp::StateTopology& topology,
                         TrainingReport* report)
{
    if (cfg.K < 1 || cfg.batch_size < 1 || cfg.max_epochs < 1 || cfg.patience < 1)
        throw std::invalid_argument("svgd: K, batch_size, max_epochs and patience must be >= 1");
    if (!(cfg.learning_rate > 0.0) || !(cfg.prior_temp >= 0.0) || !(cfg.kernel_lengthscale > 0.0))
        throw std::invalid_argument("svgd: learning rate and kernel lengthscale must be > 0, prior_temp >= 0");
    if (!(cfg.validation_fraction >= 0.0 && cfg.validation_fraction < 1.0))
        throw std::invalid_argument("svgd: validation_fraction must be in [0, 1)");

    const mdp::Dataset train = data.subset(data.training_indices());
    if (train.size() < 2)
        throw FitError("svgd: need at least 2 training transitions");
    const Eigen::MatrixXd X_all = train.inputs();
    const Eigen::MatrixXd Y_all = mdp::make_targets(train, cfg.target, topology);

    const auto n = static_cast<Eigen::Index>(train.size());
    const Eigen::Index n_val =
        n >= 10 ? std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::lround(cfg.validation_fraction * n))) : 0;
    const Eigen::Index n_fit = n - n_val;

    const Normalizer in_norm = Normalizer::fit(X_all.topRows(n_fit));
    const Normalizer out_norm = Normalizer::fit(Y_all.topRows(n_fit));
    const Eigen::MatrixXd X = in_norm.apply(X_all);
    const Eigen::MatrixXd Y = out_norm.apply(Y_all);
    const Eigen::MatrixXd X_fit = X.topRows(n_fit), Y_fit = Y.topRows(n_fit);
    const Eigen::MatrixXd X_val = X.bottomRows(n_val), Y_val = Y.bottomRows(n_val);

    MLPArch arch{data.state_dim() + data.action_dim(), cfg.hidden, data.state_dim()};
    arch.validate();
    std::vector<Eigen::VectorXd> particles;
    for (int k = 0; k < cfg.K; ++k) {
        Rng init(derive_seed(cfg.seed, 10, static_cast<std::uint64_t>(k)));
        particles.push_back(init_params(arch, init));
    }

    // Early stopping monitors the held-out set, or the fit set when it is too small.
    const Eigen::MatrixXd& X_mon = n_val > 0 ? X_val : X_fit;
    const Eigen::MatrixXd& Y_mon = n_val > 0 ? Y_val : Y_fit;

    TrainingReport rep;
    rep.initial_validation_ll = mean_validation_ll(arch, particles, X_mon, Y_mon);
    rep.best_validation_ll = rep.initial_validation_ll;
    std::vector<Eigen::VectorXd> best = particles;

    const Eigen::Index P = arch.num_params();
    std::vector<Eigen::VectorXd> m(particles.size(), Eigen::VectorXd::Zero(P));
    std::vector<Eigen::VectorXd> v(particles.size(), Eigen::VectorXd::Zero(P));
    constexpr double b1 = 0.9, b2 = 0.999, adam_eps = 1e-8;
    long step = 0;

    Rng shuffle_rng(derive_seed(cfg.seed, 11, 0));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_fit));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const std::size_t bs = static_cast<std::size_t>(std::min<Eigen::Index>(cfg.batch_size, n_fit));

    int since_best = 0;
    std::vector<Eigen::VectorXd> grads;
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng.engine());
        for (std::size_t begin = 0; begin < order.size(); begin += bs) {
            const std::size_t end = std::min(order.size(), begin + bs);
            const Eigen::MatrixXd Xb = take_rows(X_fit, order, begin, end);
            const Eigen::MatrixXd Yb = take_rows(Y_fit, order, begin, end);
            const double scale = static_cast<double>(n_fit) / static_cast<double>(end - begin);
            const std::vector<double> values =
                particle_gradients(arch, particles, Xb, Yb, cfg.prior_temp, scale, grads);
            for (std::size_t k = 0; k < values.size(); ++k)
                if (!std::isfinite(values[k]) || !grads[k].allFinite())
                    throw FitError("svgd: training diverged at epoch " + std::to_string(epoch));
            const double ell = cfg.median_heuristic ? median_lengthscale(particles) : cfg.kernel_lengthscale;
            const std::vector<Eigen::VectorXd> phi = svgd_direction(particles, grads, ell);
            ++step;
            const double c1 = 1.0 - std::pow(b1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(b2, static_cast<double>(step));
            for (std::size_t k = 0; k < particles.size(); ++k) {
                m[k] = b1 * m[k] + (1.0 - b1) * phi[k];
                v[k] = b2 * v[k] + (1.0 - b2) * phi[k].cwiseAbs2();
                particles[k].array() +=
                    cfg.learning_rate * (m[k].array() / c1) / ((v[k].array() / c2).sqrt() + adam_eps);
            }
        }
        const double ll = mean_validation_ll(arch, particles, X_mon, Y_mon);
        if (!std::isfinite(ll))
            throw FitError("svgd: training diverged at epoch " + std::to_string(epoch));
        rep.epochs = epoch;
        if (ll > rep.best_validation_ll) {
            rep.best_validation_ll = ll;
            rep.best_epoch = epoch;
            best = particles;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (report)
        *report = rep;
    return Ensemble(std::move(arch), std::move(best), in_norm, out_norm, cfg.target, cfg.prior_temp);
}

void Ensemble::member_predict(int k, const Batch& states, const Batch& actions, Eigen::MatrixXd& mean,
                              Eigen::MatrixXd& var) const
{
    if (states.cols() != state_dim() || actions.cols() != action_dim() || states.rows() != actions.rows())
        throw std::invalid_argument("ensemble: query dimension mismatch");
    Eigen::MatrixXd X(states.rows(), arch_.input_dim);
    X << states, actions;
    const MLPOutput out = mlp_forward(arch_, particles_.at(static_cast<std::size_t>(k)), input_norm_.apply(X));
    mean = (out.mean.array().rowwise() * target_norm_.std.transpose().array()).rowwise() +
           target_norm_.mean.transpose().array();
    if (target_ == mdp::TargetMode::Delta)
        mean += states;
    var = out.var.array().rowwise() * target_norm_.std.cwiseAbs2().transpose().array();
}

PredictiveMixture Ensemble::mixture(const Batch& states, const Batch& actions) const
{
    const auto K = static_cast<std::size_t>(size());
    std::vector<Eigen::MatrixXd> means(K), vars(K);
#pragma omp parallel for schedule(static) if (states.rows() > 256)
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(K); ++k)
        member_predict(static_cast<int>(k), states, actions, means[static_cast<std::size_t>(k)],
                       vars[static_cast<std::size_t>(k)]);
    return make_mixture(std::move(means), std::move(vars));
}

mdp::ModelPrediction Ensemble::predict(const Batch& states, const Batch& actions) const
{
    PredictiveMixture mix = mixture(states, actions);
    return mdp::ModelPrediction{std::move(mix.mean), mix.epistemic_var.cwiseSqrt(), std::move(mix.aleatoric_var)};
}

void Ensemble::residuals(const mdp::Dataset& data, const std::vector<std::size_t>& indices,
                         const mdp::StateTopology& topology, Eigen::MatrixXd& residual, Eigen::MatrixXd& sd) const
{
    const mdp::Dataset sub = data.subset(indices);
    const PredictiveMixture mix = mixture(sub.states(), sub.actions());
    residual = topology.difference(sub.next_states(), mix.mean);
    sd = mix.total_var().cwiseSqrt();
}

double Ensemble::calibration_error(const mdp::Dataset& data, const std::vector<std::size_t>& indices,
                                   const mdp::StateTopology& topology, const Eigen::VectorXd& tau) const
{
    Eigen::MatrixXd residual, sd;
    residuals(data, indices, topology, residual, sd);
    return bnn::calibration_error(residual, sd, tau);
}

Eigen::VectorXd Ensemble::recalibrate(const mdp::Dataset& data, const mdp::StateTopology& topology)
{
    if (data.calibration_split().empty())
        throw std::invalid_argument("ensemble: dataset has no calibration split");
    Eigen::MatrixXd residual, sd;
    residuals(data, data.calibration_split(), topology, residual, sd);
    set_calib_tau(recalibrate_tau(residual, sd));
    return calib_tau_;
}

namespace {

json vec_json(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd json_vec(const json& j)
{
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

} // namespace

std::string Ensemble::to_json() const
{
    json particles = json::array();
    for (const auto& p : particles_)
        particles.push_back(vec_json(p));
    const json doc{{"arch", {{"input_dim", arch_.input_dim}, {"hidden", arch_.hidden}, {"target_dim", arch_.target_dim}}},
                   {"particles", std::move(particles)},
                   {"input_norm", {{"mean", vec_json(input_norm_.mean)}, {"std", vec_json(input_norm_.std)}}},
                   {"target_norm", {{"mean", vec_json(target_norm_.mean)}, {"std", vec_json(target_norm_.std)}}},
                   {"target", mdp::to_string(target_)},
                   {"prior_temp", prior_temp_},
                   {"calib_tau", vec_json(calib_tau_)}};
    return doc.dump();
}

Ensemble Ensemble::from_json(const std::string& text)
{
    const json doc = json::parse(text);
    MLPArch arch{doc.at("arch").at("input_dim").get<int>(), doc.at("arch").at("hidden").get<std::vector<int>>(),
                 doc.at("arch").at("target_dim").get<int>()};
    std::vector<Eigen::VectorXd> particles;
    for (const auto& p : doc.at("particles"))
        particles.push_back(json_vec(p));
    Ensemble e(std::move(arch), std::move(particles),
               Normalizer{json_vec(doc.at("input_norm").at("mean")), json_vec(doc.at("input_norm").at("std"))},
               Normalizer{json_vec(doc.at("target_norm").at("mean")), json_vec(doc.at("target_norm").at("std"))},
               mdp::parse_target_mode(doc.at("target").get<std::string>()), doc.at("prior_temp").get<double>());
    e.set_calib_tau(json_vec(doc.at("calib_tau")));
    return e;
}

void Ensemble::save(const std::filesystem::path& path) const
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << to_json() << '\n';
}

Ensemble Ensemble::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open ensemble '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

} // namespace cope::bnn
