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

#include <array>

namespace cope::bnn {

/// Confidence levels A used by the calibration error.
inline constexpr std::array<double, 10> kCalibrationLevels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99};

/// Per-dimension calibration error of Gaussian predictions N(mu, (tau_j sd)^2)
/// given residuals y - mu:
/// CalErr_j = 1/|A| sum_alpha (EmpFreq_j(alpha) - alpha)^2, where EmpFreq_j(alpha)
/// is the fraction of rows with residual_j <= tau_j sd_j Phi^-1(alpha).
Eigen::VectorXd calibration_error_per_dim(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd,
                                          const Eigen::VectorXd& tau);

/// Mean of calibration_error_per_dim over dimensions.
double calibration_error(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd, const Eigen::VectorXd& tau);

/// The 17-point search grid 2^(-2), 2^(-1.75), ..., 2^2. Contains 1.
std::array<double, 17> tau_grid();

/// Per-dimension tau minimizing the calibration error: best grid point, then
/// golden-section refinement in log space between its neighbours. A refined
/// value replaces the grid point only if strictly better, so the result is
/// never worse than tau = 1.
Eigen::VectorXd recalibrate_tau(const Eigen::MatrixXd& residual, const Eigen::MatrixXd& sd);

} // namespace cope::bnn
