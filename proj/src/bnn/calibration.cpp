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

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <stdexcept>

namespace cope::bnn {

namespace {

const std::array<double, kCalibrationLevels.size()>& level_quantiles()
{
    static const auto z = [] {
        std::array<double, kCalibrationLevels.size()> out{};
        const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = boost::math::quantile(std_normal, kCalibrationLevels[i]);
        return out;
    }();
    return z;
}

double dim_error(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd, Eigen::Index j, double tau)
{
    const auto& z = level_quantiles();
    const auto n = static_cast<double>(residual.rows());
    double err = 0.0;
    for (std::size_t a = 0; a < z.size(); ++a) {
        std::size_t below = 0;
        for (Eigen::Index i = 0; i < residual.rows(); ++i)
            if (residual(i, j) <= tau * sd(i, j) * z[a])
                ++below;
        const double freq = static_cast<double>(below) / n;
        err += (freq - kCalibrationLevels[a]) * (freq - kCalibrationLevels[a]);
    }
    return err / static_cast<double>(z.size());
}

void check(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd)
{
    if (residual.rows() == 0)
        throw std::invalid_argument("calibration: empty calibration set");
    if (residual.rows() != sd.rows() || residual.cols() != sd.cols())
        throw std::invalid_argument("calibration: residual and std shapes differ");
}

} // namespace

Eigen::VectorXd calibration_error_per_dim(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd,
                                          const Eigen::VectorXd& tau)
{
    check(residual, sd);
    if (tau.size() != residual.cols())
        throw std::invalid_argument("calibration: tau has wrong length");
    if (!(tau.array() > 0.0).all())
        throw std::invalid_argument("calibration: tau entries must be > 0");
    Eigen::VectorXd err(residual.cols());
    for (Eigen::Index j = 0; j < residual.cols(); ++j)
        err[j] = dim_error(residual, sd, j, tau[j]);
    return err;
}

double calibration_error(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd, const Eigen::VectorXd& tau)
{
    return calibration_error_per_dim(residual, sd, tau).mean();
}

std::array<double, 17> tau_grid()
{
    std::array<double, 17> g{};
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = std::exp2(-2.0 + 0.25 * static_cast<double>(i));
    return g;
}

Eigen::VectorXd recalibrate_tau(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd)
{
    check(residual, sd);
    const auto grid = tau_grid();
    Eigen::VectorXd tau(residual.cols());
    for (Eigen::Index j = 0; j < residual.cols(); ++j) {
        // Ties go to the grid point closest to 1 (index 8).
        std::size_t best = 8;
        double best_err = dim_error(residual, sd, j, grid[best]);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double e = dim_error(residual, sd, j, grid[i]);
            const auto dist = [](std::size_t k) { return k > 8 ? k - 8 : 8 - k; };
            if (e < best_err || (e == best_err && dist(i) < dist(best))) {
                best = i;
                best_err = e;
            }
        }
        double best_tau = grid[best];

        double lo = std::log(grid[best > 0 ? best - 1 : 0]);
        double hi = std::log(grid[best + 1 < grid.size() ? best + 1 : best]);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - phi * (hi - lo);
        double x2 = lo + phi * (hi - lo);
        double f1 = dim_error(residual, sd, j, std::exp(x1));
        double f2 = dim_error(residual, sd, j, std::exp(x2));
        for (int it = 0; it < 30 && hi - lo > 1e-6; ++it) {
            if (f1 < best_err) {
                best_err = f1;
                best_tau = std::exp(x1);
            }
            if (f2 < best_err) {
                best_err = f2;
                best_tau = std::exp(x2);
            }
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = dim_error(residual, sd, j, std::exp(x1));
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = dim_error(residual, sd, j, std::exp(x2));
            }
        }
        tau[j] = best_tau;
    }
    return tau;
}

} // namespace cope::bnn
