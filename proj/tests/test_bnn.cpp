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

#include "cope/bnn/calibration.hpp"
#include "cope/bnn/ensemble.hpp"
#include "cope/bnn/mlp.hpp"
#include "cope/bnn/svgd.hpp"
#include "support.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace cope;
using namespace cope::bnn;

namespace {

// Scalar forward pass written from the documented parameter layout.
void naive_forward(const MLPArch& arch, const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
                   Eigen::VectorXd& mean, Eigen::VectorXd& var)
{
    const std::vector<int> w = arch.widths();
    std::vector<double> a(x.data(), x.data() + x.size());
    Eigen::Index off = 0;
    for (std::size_t l = 0; l + 1 < w.size(); ++l) {
        const int in = w[l], out = w[l + 1];
        std::vector<double> z(static_cast<std::size_t>(out), 0.0);
        for (int o = 0; o < out; ++o) {
            double s = theta[off + static_cast<Eigen::Index>(in) * out + o];
            for (int i = 0; i < in; ++i)
                s += theta[off + static_cast<Eigen::Index>(i) * out + o] * a[static_cast<std::size_t>(i)];
            z[static_cast<std::size_t>(o)] = (l + 2 < w.size()) ? std::max(0.0, s) : s;
        }
        off += static_cast<Eigen::Index>(in) * out + out;
        a = std::move(z);
    }
    mean.resize(arch.target_dim);
    var.resize(arch.target_dim);
    for (int j = 0; j < arch.target_dim; ++j) {
        mean[j] = a[static_cast<std::size_t>(j)];
        const double sp = std::log1p(std::exp(a[static_cast<std::size_t>(arch.target_dim + j)]));
        var[j] = (sp + kStdFloor) * (sp + kStdFloor);
    }
}

MLPArch tiny_arch(Rng& rng)
{
    MLPArch arch;
    arch.input_dim = 1 + static_cast<int>(rng.index(3));
    const int layers = static_cast<int>(rng.index(3));
    for (int l = 0; l < layers; ++l)
        arch.hidden.push_back(2 + static_cast<int>(rng.index(4)));
    arch.target_dim = 1 + static_cast<int>(rng.index(2));
    return arch;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index r, Eigen::Index c, Rng& rng)
{
    Eigen::MatrixXd M(r, c);
    for (Eigen::Index i = 0; i < M.size(); ++i)
        M.data()[i] = rng.normal();
    return M;
}

double oracle_calibration_error(const Eigen::VectorXd& residual, const Eigen::VectorXd& sd, double tau)
{
    const boost::math::normal_distribution<double> n01;
    double err = 0.0;
    for (double alpha : kCalibrationLevels) {
        const double z = boost::math::quantile(n01, alpha);
        double hits = 0.0;
        for (Eigen::Index i = 0; i < residual.size(); ++i)
            hits += residual[i] <= tau * sd[i] * z ? 1.0 : 0.0;
        const double freq = hits / static_cast<double>(residual.size());
        err += (freq - alpha) * (freq - alpha);
    }
    return err / static_cast<double>(kCalibrationLevels.size());
}

} // namespace

TEST_CASE("mlp forward matches a scalar reference")
{
    Rng rng(11);
    for (int net = 0; net < 10; ++net) {
        const MLPArch arch = tiny_arch(rng);
        const Eigen::VectorXd theta = gaussian_matrix(arch.num_params(), 1, rng);
        const Eigen::MatrixXd X = gaussian_matrix(6, arch.input_dim, rng);
        const MLPOutput out = mlp_forward(arch, theta, X);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::VectorXd m, v;
            naive_forward(arch, theta, X.row(i).transpose(), m, v);
            CHECK((out.mean.row(i).transpose() - m).cwiseAbs().maxCoeff() < 1e-12);
            CHECK((out.var.row(i).transpose() - v).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("log-likelihood gradient matches central finite differences")
{
    Rng rng(12);
    for (int net = 0; net < 10; ++net) {
        const MLPArch arch = tiny_arch(rng);
        const Eigen::VectorXd theta = 0.7 * gaussian_matrix(arch.num_params(), 1, rng);
        const Eigen::MatrixXd X = gaussian_matrix(8, arch.input_dim, rng);
        const Eigen::MatrixXd Y = gaussian_matrix(8, arch.target_dim, rng);
        Eigen::VectorXd g;
        log_posterior(arch, theta, X, Y, 0.3, 2.0, &g);
        const double h = 1e-6;
        for (Eigen::Index p = 0; p < theta.size(); ++p) {
            Eigen::VectorXd tp = theta, tm = theta;
            tp[p] += h;
            tm[p] -= h;
            const double fd = (log_posterior(arch, tp, X, Y, 0.3, 2.0, nullptr) -
                               log_posterior(arch, tm, X, Y, 0.3, 2.0, nullptr)) /
                              (2.0 * h);
            const double rel = std::abs(fd - g[p]) / std::max(1.0, std::abs(fd));
            CHECK(rel < 1e-4);
        }
    }
}

TEST_CASE("log-likelihood value matches the Gaussian density")
{
    Rng rng(13);
    const MLPArch arch = tiny_arch(rng);
    const Eigen::VectorXd theta = gaussian_matrix(arch.num_params(), 1, rng);
    const Eigen::MatrixXd X = gaussian_matrix(5, arch.input_dim, rng);
    const Eigen::MatrixXd Y = gaussian_matrix(5, arch.target_dim, rng);
    double ref = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::VectorXd m, v;
        naive_forward(arch, theta, X.row(i).transpose(), m, v);
        for (Eigen::Index j = 0; j < m.size(); ++j)
            ref += -0.5 * std::log(2.0 * std::numbers::pi * v[j]) - 0.5 * (Y(i, j) - m[j]) * (Y(i, j) - m[j]) / v[j];
    }
    CHECK(log_likelihood(arch, theta, X, Y, nullptr) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(log_prior(theta, nullptr) ==
          doctest::Approx(-0.5 * theta.squaredNorm() -
                          0.5 * static_cast<double>(theta.size()) * std::log(2.0 * std::numbers::pi)));
}

TEST_CASE("svgd step matches a double-loop reference")
{
    Rng rng(14);
    for (int rep = 0; rep < 5; ++rep) {
        const MLPArch arch = tiny_arch(rng);
        const int K = 2 + static_cast<int>(rng.index(5));
        std::vector<Eigen::VectorXd> particles;
        for (int k = 0; k < K; ++k)
            particles.push_back(gaussian_matrix(arch.num_params(), 1, rng));
        const Eigen::MatrixXd X = gaussian_matrix(10, arch.input_dim, rng);
        const Eigen::MatrixXd Y = gaussian_matrix(10, arch.target_dim, rng);
        const double ell = 3.0, step = 1e-3;

        std::vector<Eigen::VectorXd> g(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            log_posterior(arch, particles[static_cast<std::size_t>(k)], X, Y, 0.1, 1.5, &g[static_cast<std::size_t>(k)]);
        const auto next = svgd_step(arch, particles, X, Y, 0.1, 1.5, ell, step);
        REQUIRE(next.size() == particles.size());
        for (int k = 0; k < K; ++k) {
            const Eigen::VectorXd& tk = particles[static_cast<std::size_t>(k)];
            Eigen::VectorXd phi = Eigen::VectorXd::Zero(tk.size());
            for (int j = 0; j < K; ++j) {
                const Eigen::VectorXd& tj = particles[static_cast<std::size_t>(j)];
                const double kij = std::exp(-(tj - tk).squaredNorm() / (2.0 * ell));
                phi += kij * g[static_cast<std::size_t>(j)] - kij * (tj - tk) / ell;
            }
            phi /= static_cast<double>(K);
            CHECK((next[static_cast<std::size_t>(k)] - (tk + step * phi)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("single particle svgd is gradient ascent")
{
    Rng rng(15);
    const MLPArch arch = tiny_arch(rng);
    const Eigen::VectorXd theta = gaussian_matrix(arch.num_params(), 1, rng);
    const Eigen::MatrixXd X = gaussian_matrix(10, arch.input_dim, rng);
    const Eigen::MatrixXd Y = gaussian_matrix(10, arch.target_dim, rng);
    Eigen::VectorXd g;
    log_posterior(arch, theta, X, Y, 0.2, 1.0, &g);
    const auto next = svgd_step(arch, {theta}, X, Y, 0.2, 1.0, 0.5, 0.01);
    CHECK((next[0] - (theta + 0.01 * g)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parallel particle gradients equal per-particle gradients")
{
    Rng rng(16);
    const MLPArch arch = tiny_arch(rng);
    std::vector<Eigen::VectorXd> particles;
    for (int k = 0; k < 6; ++k)
        particles.push_back(gaussian_matrix(arch.num_params(), 1, rng));
    const Eigen::MatrixXd X = gaussian_matrix(7, arch.input_dim, rng);
    const Eigen::MatrixXd Y = gaussian_matrix(7, arch.target_dim, rng);
    std::vector<Eigen::VectorXd> grads;
    const auto values = particle_gradients(arch, particles, X, Y, 0.1, 1.0, grads);
    for (std::size_t k = 0; k < particles.size(); ++k) {
        Eigen::VectorXd g;
        CHECK(values[k] == log_posterior(arch, particles[k], X, Y, 0.1, 1.0, &g));
        CHECK(grads[k] == g);
    }
}

TEST_CASE("median heuristic")
{
    std::vector<Eigen::VectorXd> p{Eigen::VectorXd::Zero(2), Eigen::Vector2d(3.0, 4.0), Eigen::Vector2d(6.0, 8.0)};
    // pairwise distances 5, 10, 5: median 5
    CHECK(median_lengthscale(p) == doctest::Approx(25.0 / (2.0 * std::log(4.0))));
}

TEST_CASE("calibration error matches the quantile oracle")
{
    Rng rng(17);
    const Eigen::MatrixXd sd = (gaussian_matrix(300, 2, rng).array().abs() + 0.1).matrix();
    const Eigen::MatrixXd res = gaussian_matrix(300, 2, rng);
    const Eigen::Vector2d tau(0.8, 1.7);
    const Eigen::VectorXd per = calibration_error_per_dim(res, sd, tau);
    for (int j = 0; j < 2; ++j)
        CHECK(per[j] == doctest::Approx(oracle_calibration_error(res.col(j), sd.col(j), tau[j])).epsilon(1e-12));
    CHECK(calibration_error(res, sd, tau) == doctest::Approx(per.mean()));
}

TEST_CASE("self-consistent predictions are calibrated at tau = 1")
{
    Rng rng(18);
    const Eigen::Index n = 20000;
    Eigen::MatrixXd sd(n, 3), res(n, 3);
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
        sd.data()[i] = rng.uniform(0.1, 3.0);
        res.data()[i] = sd.data()[i] * rng.normal();
    }
    CHECK(calibration_error(res, sd, Eigen::VectorXd::Ones(3)) < 0.01);
    const Eigen::VectorXd tau = recalibrate_tau(res, sd);
    const auto grid = tau_grid();
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(tau[j] >= grid[7]);
        CHECK(tau[j] <= grid[9]);
    }
}

TEST_CASE("halved variance is recovered as tau near 2")
{
    Rng rng(19);
    const Eigen::Index n = 5000;
    Eigen::MatrixXd sd(n, 2), res(n, 2);
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
        sd.data()[i] = rng.uniform(0.1, 3.0);
        res.data()[i] = 2.0 * sd.data()[i] * rng.normal();
    }
    const Eigen::VectorXd tau = recalibrate_tau(res, sd);
    for (Eigen::Index j = 0; j < 2; ++j) {
        CHECK(tau[j] >= 1.8);
        CHECK(tau[j] <= 2.2);
    }
    CHECK(calibration_error(res, sd, tau) <= calibration_error(res, sd, Eigen::VectorXd::Ones(2)));
}

TEST_CASE("recalibration never increases the calibration error")
{
    Rng rng(20);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng.index(300));
        const double true_scale = std::exp(rng.uniform(-2.0, 2.0));
        const double bias = rng.uniform(-1.0, 1.0);
        Eigen::MatrixXd sd(n, 2), res(n, 2);
        for (Eigen::Index i = 0; i < sd.size(); ++i) {
            sd.data()[i] = rng.uniform(0.05, 2.0);
            res.data()[i] = bias + true_scale * sd.data()[i] * rng.normal();
        }
        const Eigen::VectorXd tau = recalibrate_tau(res, sd);
        CHECK((tau.array() > 0.0).all());
        const Eigen::VectorXd e_star = calibration_error_per_dim(res, sd, tau);
        const Eigen::VectorXd e_one = calibration_error_per_dim(res, sd, Eigen::VectorXd::Ones(2));
        CHECK((e_star.array() <= e_one.array()).all());
    }
}

TEST_CASE("mixture moments match the mixture definition")
{
    Rng rng(21);
    std::vector<Eigen::MatrixXd> means, vars;
    for (int k = 0; k < 4; ++k) {
        means.push_back(gaussian_matrix(3, 2, rng));
        vars.push_back((gaussian_matrix(3, 2, rng).array().square() + 0.1).matrix());
    }
    const PredictiveMixture mix = make_mixture(means, vars);
    for (Eigen::Index i = 0; i < 3; ++i) {
        for (Eigen::Index j = 0; j < 2; ++j) {
            double m = 0.0, ale = 0.0;
            for (int k = 0; k < 4; ++k) {
                m += means[static_cast<std::size_t>(k)](i, j) / 4.0;
                ale += vars[static_cast<std::size_t>(k)](i, j) / 4.0;
            }
            double epi = 0.0;
            for (int k = 0; k < 4; ++k)
                epi += std::pow(means[static_cast<std::size_t>(k)](i, j) - m, 2) / 4.0;
            CHECK(mix.mean(i, j) == doctest::Approx(m));
            CHECK(mix.epistemic_var(i, j) == doctest::Approx(epi));
            CHECK(mix.aleatoric_var(i, j) == doctest::Approx(ale));
        }
        const Eigen::Vector2d y(0.3, -0.4);
        double dens = 0.0;
        for (int k = 0; k < 4; ++k) {
            double p = 1.0;
            for (Eigen::Index j = 0; j < 2; ++j) {
                const double v = vars[static_cast<std::size_t>(k)](i, j);
                const double d = y[j] - means[static_cast<std::size_t>(k)](i, j);
                p *= std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * std::numbers::pi * v);
            }
            dens += p / 4.0;
        }
        CHECK(mix.log_density(i, y) == doctest::Approx(std::log(dens)).epsilon(1e-10));
    }
}

TEST_CASE("normalizer standardizes columns and guards constant ones")
{
    Eigen::MatrixXd X(4, 2);
    X << 1, 5, 2, 5, 3, 5, 4, 5;
    const Normalizer n = Normalizer::fit(X);
    CHECK(n.std[1] == 1.0);
    const Eigen::MatrixXd Z = n.apply(X);
    CHECK(Z.col(0).mean() == doctest::Approx(0.0));
    CHECK(Z.col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ensemble training learns a linear system and round-trips through JSON")
{
    const auto env = testing::linear_env(2, 5, 0.02);
    auto data = mdp::generate_uniform_dataset(*env, Box::uniform(2, -1.0, 1.0), 600, 5);
    data.set_tail_calibration(0.2);
    SVGDConfig cfg;
    cfg.K = 3;
    cfg.hidden = {32};
    cfg.max_epochs = 200;
    cfg.patience = 20;
    cfg.target = mdp::TargetMode::Delta;
    cfg.seed = 7;
    TrainingReport report;
    Ensemble ens = Ensemble::train(data, cfg, env->task().topology, &report);
    CHECK(ens.size() == 3);
    CHECK(report.best_validation_ll > report.initial_validation_ll);
    CHECK(report.best_epoch <= report.epochs);

    Batch S(2, 2), A(2, 2);
    S << 0.2, -0.5, -0.7, 0.1;
    A << 0.5, 0.5, -0.3, 0.9;
    const auto p = ens.predict(S, A);
    const Batch truth = 0.9 * S + 0.5 * A;
    CHECK((p.mean - truth).cwiseAbs().maxCoeff() < 0.1);
    CHECK((p.epistemic_std.array() >= 0.0).all());

    const Eigen::VectorXd tau = ens.recalibrate(data, env->task().topology);
    CHECK(tau.size() == 2);
    CHECK(ens.confidence_scale() == tau);
    const auto calib = data.calibration_split();
    CHECK(ens.calibration_error(data, calib, env->task().topology, tau) <=
          ens.calibration_error(data, calib, env->task().topology, Eigen::VectorXd::Ones(2)));

    const Ensemble back = Ensemble::from_json(ens.to_json());
    const auto q = back.predict(S, A);
    CHECK(q.mean == p.mean);
    CHECK(q.epistemic_std == p.epistemic_std);
    CHECK(back.calib_tau() == ens.calib_tau());
    CHECK(back.arch() == ens.arch());
    CHECK_THROWS(Ensemble::from_json("{\"arch\": 3}"));
}

TEST_CASE("ensemble training is deterministic for a fixed seed")
{
    const auto env = testing::linear_env(1, 5, 0.05);
    const auto data = mdp::generate_uniform_dataset(*env, Box::uniform(1, -1.0, 1.0), 200, 2);
    SVGDConfig cfg;
    cfg.K = 2;
    cfg.hidden = {8};
    cfg.max_epochs = 5;
    const Ensemble a = Ensemble::train(data, cfg, env->task().topology);
    const Ensemble b = Ensemble::train(data, cfg, env->task().topology);
    for (int k = 0; k < 2; ++k)
        CHECK(a.particles()[static_cast<std::size_t>(k)] == b.particles()[static_cast<std::size_t>(k)]);
    CHECK(a.calib_tau() == Eigen::VectorXd::Ones(1));
    CHECK_THROWS(Ensemble(a).set_calib_tau(Eigen::VectorXd::Zero(1)));
}
