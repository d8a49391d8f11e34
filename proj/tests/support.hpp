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

#ifndef TETHER_TESTS_SUPPORT_HPP
#define TETHER_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tether/state.hpp"

namespace tether::testing {

using Vec = std::vector<double>;
using Map = std::function<Vec(const Vec&)>;

/// Extended state as canonical coordinates (q, x | p, y).
inline Vec to_canonical(const ExtendedState& s)
{
    Vec z;
    z.insert(z.end(), s.q.begin(), s.q.end());
    z.insert(z.end(), s.x.begin(), s.x.end());
    z.insert(z.end(), s.p.begin(), s.p.end());
    z.insert(z.end(), s.y.begin(), s.y.end());
    return z;
}

inline ExtendedState from_canonical(const Vec& z)
{
    const std::size_t d = z.size() / 4;
    auto part = [&](std::size_t k) { return Vec(z.begin() + static_cast<long>(k * d), z.begin() + static_cast<long>((k + 1) * d)); };
    return ExtendedState(part(0), part(2), part(1), part(3));
}

/// Central-difference Jacobian.
inline Eigen::MatrixXd fd_jacobian(const Map& f, const Vec& z, double h = 1e-6)
{
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Vec zp = z, zm = z;
        zp[static_cast<std::size_t>(j)] += h;
        zm[static_cast<std::size_t>(j)] -= h;
        const Vec fp = f(zp), fm = f(zm);
        for (Eigen::Index i = 0; i < n; ++i) {
            M(i, j) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
        }
    }
    return M;
}

inline Eigen::MatrixXd canonical_j(Eigen::Index n)
{
    const Eigen::Index d = n / 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    J.topRightCorner(d, d).setIdentity();
    J.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
    return J;
}

/// max |M^T J M - J|
inline double symplectic_defect(const Eigen::MatrixXd& M)
{
    const auto J = canonical_j(M.rows());
    return (M.transpose() * J * M - J).cwiseAbs().maxCoeff();
}

/// Plain RK4 on z' = f(z), written here so test oracles do not share code
/// with the library integrators.
inline Vec rk4(const Map& f, Vec z, double h, std::size_t steps)
{
    auto axpy = [](const Vec& a, double s, const Vec& b) {
        Vec out(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            out[i] = a[i] + s * b[i];
        }
        return out;
    };
    for (std::size_t n = 0; n < steps; ++n) {
        const Vec k1 = f(z);
        const Vec k2 = f(axpy(z, h / 2, k1));
        const Vec k3 = f(axpy(z, h / 2, k2));
        const Vec k4 = f(axpy(z, h, k3));
        for (std::size_t i = 0; i < z.size(); ++i) {
            z[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
    }
    return z;
}

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20260317);
    return gen;
}

inline double uniform(double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline Vec uniform_vec(std::size_t n, double lo, double hi)
{
    Vec v(n);
    for (auto& x : v) {
        x = uniform(lo, hi);
    }
    return v;
}

inline ExtendedState random_state(std::size_t d, double lo, double hi)
{
    return ExtendedState(uniform_vec(d, lo, hi), uniform_vec(d, lo, hi), uniform_vec(d, lo, hi),
                         uniform_vec(d, lo, hi));
}

inline double max_abs_diff(const Vec& a, const Vec& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

} // namespace tether::testing

#endif
