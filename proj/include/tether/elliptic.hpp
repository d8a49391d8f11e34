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

#ifndef TETHER_ELLIPTIC_HPP
#define TETHER_ELLIPTIC_HPP

namespace tether {

struct JacobiValues {
    double sn;
    double cn;
    double dn;
};

/// sn, cn, dn of (u | m) for 0 <= m < 1 by descending Landen / AGM
/// iteration. Throws std::invalid_argument for m outside [0, 1).
JacobiValues jacobi_elliptic(double u, double m);

inline double jacobi_cn(double u, double m) { return jacobi_elliptic(u, m).cn; }
inline double jacobi_sn(double u, double m) { return jacobi_elliptic(u, m).sn; }
inline double jacobi_dn(double u, double m) { return jacobi_elliptic(u, m).dn; }

/// Arithmetic-geometric mean of two positive numbers.
double agm(double a, double b);

/// Complete elliptic integral of the first kind K(m) for any m < 1
/// (negative parameters included), as pi / (2 agm(1, sqrt(1 - m))).
double elliptic_k(double m);

/// K(m) by the trapezoidal rule on the periodic integrand
/// 1 / sqrt(1 - m sin^2 theta); converges geometrically.
double elliptic_k_quadrature(double m, int panels = 512);

} // namespace tether

#endif
