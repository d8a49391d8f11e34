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

#ifndef TETHER_AVERAGING_HPP
#define TETHER_AVERAGING_HPP

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace tether {

// Rotation average of J S for symmetric S = [[A, B], [B^T, D]]:
//
//     Omega = (1 / 2 pi) * integral_0^{2 pi} exp(-J tau) J S exp(J tau) dtau
//           = 1/2 [[B^T - B, A + D], [-(A + D), B^T - B]]
//
// with J = [[0, I], [-I, 0]].

/// The canonical matrix J of size 2d.
Eigen::MatrixXd symplectic_j(Eigen::Index d);

/// `integral` is the closed form of the average above. `flipped` negates
/// the lower right block; it is skew as well but is not the average unless
/// B is symmetric.
enum class AveragedBlock { integral, flipped };

/// Throws std::invalid_argument when S is not square of even size or not
/// symmetric to 1e-12 relative.
Eigen::MatrixXd lemma_averaged_matrix(const Eigen::MatrixXd& S, AveragedBlock block = AveragedBlock::integral);

struct OrthogonalityReport {
    /// max over sample points of |Phi^T Phi - I|_max
    double max_defect = 0.0;
    double s_end = 0.0;
    std::size_t steps = 0;
};

/// Integrates Phi' = Omega(s) Phi, Phi(0) = I, with classical RK4 on a
/// uniform grid of `steps` steps over [0, s_end], tracking orthogonality.
OrthogonalityReport fundamental_matrix_orthogonality(const std::function<Eigen::MatrixXd(double)>& omega_of_s,
                                                     Eigen::Index size, double s_end, std::size_t steps);

} // namespace tether

#endif
