// Copyright 2026 The Tether Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tether/averaging.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace tether {

Eigen::MatrixXd symplectic_j(Eigen::Index d)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * d, 2 * d);
    J.topRightCorner(d, d).setIdentity();
    J.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    return J;
}

Eigen::MatrixXd lemma_averaged_matrix(const Eigen::MatrixXd& S, AveragedBlock block)
{
    if (S.rows() != S.cols() || S.rows() == 0 || S.rows() % 2 != 0) {
        throw std::invalid_argument(
            fmt::format("lemma_averaged_matrix: S must be square of even size, got {}x{}", S.rows(), S.cols()));
    }
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale) {
        throw std::invalid_argument(fmt::format("lemma_averaged_matrix: S is not symmetric (|S - S^T| = {})", asym));
    }
    const Eigen::Index d = S.rows() / 2;
    const Eigen::MatrixXd A = S.topLeftCorner(d, d);
    const Eigen::MatrixXd B = S.topRightCorner(d, d);
    const Eigen::MatrixXd D = S.bottomRightCorner(d, d);

    Eigen::MatrixXd omega(2 * d, 2 * d);
    const Eigen::MatrixXd skew = 0.5 * (B.transpose() - B);
    omega.topLeftCorner(d, d) = skew;
    omega.topRightCorner(d, d) = 0.5 * (A + D);
    omega.bottomLeftCorner(d, d) = -0.5 * (A + D);
    omega.bottomRightCorner(d, d) = block == AveragedBlock::integral ? skew : Eigen::MatrixXd(-skew);
    return omega;
}

OrthogonalityReport fundamental_matrix_orthogonality(const std::function<Eigen::MatrixXd(double)>& omega_of_s,
                                                     Eigen::Index size, double s_end, std::size_t steps)
{
    if (steps == 0 || !(s_end > 0.0) || size <= 0) {
        throw std::invalid_argument("fundamental_matrix_orthogonality: need steps > 0, s_end > 0, size > 0");
    }
    const double h = s_end / static_cast<double>(steps);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(size, size);
    Eigen::MatrixXd phi = I;
    OrthogonalityReport report;
    report.s_end = s_end;
    report.steps = steps;
    for (std::size_t n = 0; n < steps; ++n) {
        const double s = static_cast<double>(n) * h;
        const Eigen::MatrixXd w0 = omega_of_s(s);
        const Eigen::MatrixXd wm = omega_of_s(s + 0.5 * h);
        const Eigen::MatrixXd w1 = omega_of_s(s + h);
        const Eigen::MatrixXd k1 = w0 * phi;
        const Eigen::MatrixXd k2 = wm * (phi + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = wm * (phi + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = w1 * (phi + h * k3);
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        report.max_defect = std::max(report.max_defect, (phi.transpose() * phi - I).cwiseAbs().maxCoeff());
    }
    return report;
}

} // namespace tether
