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

#include "tether/elliptic.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace tether {

JacobiValues jacobi_elliptic(double u, double m)
{
    if (!(m >= 0.0 && m < 1.0)) {
        throw std::invalid_argument(fmt::format("jacobi_elliptic: parameter m must lie in [0, 1), got {}", m));
    }
    if (m == 0.0) {
        return {std::sin(u), std::cos(u), 1.0};
    }

    // AGM sequence a_n, c_n with a_0 = 1, b_0 = sqrt(1 - m), c_0 = sqrt(m).
    constexpr int max_terms = 16;
    std::array<double, max_terms> a{};
    std::array<double, max_terms> c{};
    a[0] = 1.0;
    double b = std::sqrt(1.0 - m);
    c[0] = std::sqrt(m);
    int n = 0;
    while (std::abs(c[n]) > std::numeric_limits<double>::epsilon() * a[n]) {
        if (n + 1 == max_terms) {
            throw std::runtime_error("jacobi_elliptic: AGM iteration did not converge");
        }
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = std::sqrt(a[n] * b);
        ++n;
    }

    // Descend: phi_N = 2^N a_N u, phi_{k-1} = (phi_k + asin(c_k / a_k sin phi_k)) / 2.
    double phi = std::ldexp(a[n] * u, n);
    for (int k = n; k > 0; --k) {
        phi = 0.5 * (phi + std::asin(c[k] / a[k] * std::sin(phi)));
    }
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    // dn > 0 for m < 1.
    const double dn = std::sqrt(1.0 - m * sn * sn);
    return {sn, cn, dn};
}

double agm(double a, double b)
{
    if (!(a > 0.0 && b > 0.0)) {
        throw std::invalid_argument("agm: arguments must be positive");
    }
    for (int i = 0; i < 64; ++i) {
        const double next_a = 0.5 * (a + b);
        const double next_b = std::sqrt(a * b);
        if (std::abs(next_a - next_b) <= 4.0 * std::numeric_limits<double>::epsilon() * next_a) {
            return 0.5 * (next_a + next_b);
        }
        a = next_a;
        b = next_b;
    }
    return 0.5 * (a + b);
}

double elliptic_k(double m)
{
    if (!(m < 1.0) || std::isnan(m)) {
        throw std::invalid_argument(fmt::format("elliptic_k: parameter must be < 1, got {}", m));
    }
    return std::numbers::pi / (2.0 * agm(1.0, std::sqrt(1.0 - m)));
}

double elliptic_k_quadrature(double m, int panels)
{
    if (!(m < 1.0) || std::isnan(m)) {
        throw std::invalid_argument(fmt::format("elliptic_k_quadrature: parameter must be < 1, got {}", m));
    }
    if (panels < 1) {
        throw std::invalid_argument("elliptic_k_quadrature: need at least one panel");
    }
    // The integrand is even and pi-periodic, so the trapezoidal rule over a
    // full period is spectrally accurate.
    const double h = std::numbers::pi / panels;
    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double s = std::sin(i * h);
        sum += 1.0 / std::sqrt(1.0 - m * s * s);
    }
    return 0.5 * h * sum;
}

} // namespace tether
