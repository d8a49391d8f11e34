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

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "support.hpp"
#include "tether/elliptic.hpp"
#include "tether/integrator.hpp"
#include "tether/models.hpp"
#include "tether/oracles.hpp"

using namespace tether;
using namespace tether::testing;

namespace {

Vec product_field(const Vec& z)
{
    const double q = z[0], p = z[1];
    return {p * (q * q + 1.0), -q * (p * p + 1.0)};
}

/// First return of P to zero from (Q0, 0), located by RK4 stepping and a
/// secant search on the length of the last step.
double event_half_period(double Q0)
{
    const double h = 1e-3;
    Vec z{Q0, 0.0};
    double t = 0.0;
    // Leave the start before looking for the sign change.
    Vec next = rk4(product_field, z, h, 1);
    const double sign = next[1] > 0 ? 1.0 : -1.0;
    while (true) {
        next = rk4(product_field, z, h, 1);
        if (t > 0.0 && sign * next[1] <= 0.0) {
            break;
        }
        z = next;
        t += h;
    }
    double a = 0.0, b = h;
    double fa = z[1], fb = next[1];
    for (int it = 0; it < 60 && std::abs(b - a) > 1e-16; ++it) {
        const double c = b - fb * (b - a) / (fb - fa);
        const double fc = rk4(product_field, z, c, 1)[1];
        a = b;
        fa = fb;
        b = c;
        fb = fc;
    }
    return t + b;
}

} // namespace

TEST_CASE("Jacobi identities at random points")
{
    for (int i = 0; i < 1000; ++i) {
        const double u = uniform(-20.0, 20.0);
        const double m = uniform(0.0, 0.999);
        const auto v = jacobi_elliptic(u, m);
        CHECK(std::abs(v.cn * v.cn + v.sn * v.sn - 1.0) <= 1e-12);
        CHECK(std::abs(v.dn * v.dn + m * v.sn * v.sn - 1.0) <= 1e-12);
    }
}

TEST_CASE("Jacobi functions in the circular limit and derivatives")
{
    for (double u : {-3.0, -0.4, 0.0, 0.7, 2.5, 11.0}) {
        CHECK(jacobi_sn(u, 0.0) == doctest::Approx(std::sin(u)).epsilon(1e-14));
        CHECK(jacobi_cn(u, 0.0) == doctest::Approx(std::cos(u)).epsilon(1e-14));
        CHECK(jacobi_dn(u, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    }
    // d cn / du = -sn dn
    for (int i = 0; i < 50; ++i) {
        const double u = uniform(-5.0, 5.0), m = uniform(0.0, 0.95), h = 1e-5;
        const double d = (jacobi_cn(u + h, m) - jacobi_cn(u - h, m)) / (2 * h);
        CHECK(d == doctest::Approx(-jacobi_sn(u, m) * jacobi_dn(u, m)).epsilon(1e-8));
    }
    // cn(K | m) = 0
    const double m = 0.9;
    CHECK(std::abs(jacobi_cn(elliptic_k(m), m)) < 1e-12);
    CHECK_THROWS_AS(jacobi_elliptic(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(jacobi_elliptic(1.0, -0.1), std::invalid_argument);
}

TEST_CASE("AGM and complete elliptic integral")
{
    CHECK(agm(1.0, 1.0) == 1.0);
    CHECK(agm(24.0, 6.0) == doctest::Approx(13.458171481725615).epsilon(1e-14));
    CHECK(elliptic_k(0.0) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    for (double m : {-9.0, -1.0, 0.3, 0.9, 0.99}) {
        CHECK(elliptic_k(m) == doctest::Approx(elliptic_k_quadrature(m, 4096)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(agm(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(elliptic_k(1.0), std::invalid_argument);
}

TEST_CASE("half period against event detection and quadrature")
{
    const double T = half_period(-3.0);
    CHECK(T == doctest::Approx(2.0 * elliptic_k(-9.0)).epsilon(1e-15));
    CHECK(std::abs(T - event_half_period(-3.0)) <= 1e-9);
    CHECK(std::abs(T - half_period_quadrature(-3.0)) <= 1e-10);
    for (double q0 : {0.2, 1.0, 2.0, -4.0}) {
        CHECK(half_period(q0) == doctest::Approx(half_period_quadrature(q0)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(half_period(0.0), std::invalid_argument);
    CHECK_THROWS_AS(elliptic_params(0.0), std::invalid_argument);
}

TEST_CASE("exact product solution solves the equations of motion")
{
    ProductExactSolution exact(-3.0);
    CHECK(exact.params().m == doctest::Approx(0.9));
    const auto [q0, p0] = exact(0.0);
    CHECK(q0 == -3.0);
    CHECK(p0 == 0.0);
    const double T = exact.params().half_period;
    const auto [qh, ph] = exact(T);
    CHECK(qh == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(ph) < 1e-10);
    const double h = 1e-5;
    for (int i = 0; i < 200; ++i) {
        const double t = uniform(0.0, 30.0);
        const auto [q, p] = exact(t);
        const auto [qa, pa] = exact(t + h);
        const auto [qb, pb] = exact(t - h);
        CHECK(0.5 * (q * q + 1) * (p * p + 1) == doctest::Approx(5.0).epsilon(1e-12));
        CHECK((qa - qb) / (2 * h) == doctest::Approx(p * (q * q + 1)).epsilon(1e-6));
        CHECK((pa - pb) / (2 * h) == doctest::Approx(-q * (p * p + 1)).epsilon(1e-6));
    }
    // Agrees with an independent RK4 run.
    const Vec z = rk4(product_field, {-3.0, 0.0}, 1e-4, 50000);
    const auto [q5, p5] = exact(5.0);
    CHECK(q5 == doctest::Approx(z[0]).epsilon(1e-9));
    CHECK(p5 == doctest::Approx(z[1]).epsilon(1e-9));

    const Vec times{0.0, 1.0, 2.5};
    const auto sampled = exact.sample(times);
    REQUIRE(sampled.size() == 3);
    CHECK(sampled.at(2).q()[0] == exact(2.5).first);
}

TEST_CASE("certified reference flow")
{
    ProductHamiltonian H;
    ReferenceOptions opt;
    opt.samples = 10;
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto ref = reference_flow(H, Q0, P0, 10.0, opt);
    CHECK(ref.certificate.converged);
    CHECK(ref.certificate.endpoint_change <= 1e-11 * 3.0 + 1e-30);
    REQUIRE(ref.trajectory.size() == 11);
    ProductExactSolution exact(-3.0);
    for (std::size_t i = 0; i < ref.trajectory.size(); ++i) {
        const auto [q, p] = exact(ref.trajectory.time(i));
        CHECK(std::abs(ref.trajectory.at(i).q()[0] - q) < 1e-9);
        CHECK(std::abs(ref.trajectory.at(i).p()[0] - p) < 1e-9);
    }

    ReferenceOptions strict;
    strict.rel_tol = 1e-20;
    strict.max_refinements = 2;
    CHECK_THROWS_AS(reference_flow(H, Q0, P0, 10.0, strict), ReferenceDidNotConverge);
    CHECK_THROWS_AS(reference_flow(H, Q0, P0, -1.0, opt), std::invalid_argument);
}

TEST_CASE("dissipative reference matches the damped oscillator")
{
    HarmonicOscillator H(1);
    const double gamma = 0.3;
    const auto force = ForceModel::linear_damping(gamma);
    const double Q0[] = {1.0}, P0[] = {0.0};
    const auto ref = reference_dissipative(H, force, Q0, P0, 5.0);
    const double w = std::sqrt(1.0 - gamma * gamma / 4.0), T = 5.0;
    const double q = std::exp(-gamma * T / 2) * (std::cos(w * T) + gamma / (2 * w) * std::sin(w * T));
    CHECK(ref.trajectory.back().q()[0] == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("plain RK4 comparator")
{
    ProductHamiltonian H;
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto [q1, p1] = rk4_step(H, Q0, P0, 0.01);
    const Vec z = rk4(product_field, {-3.0, 0.0}, 0.01, 1);
    CHECK(q1[0] == doctest::Approx(z[0]).epsilon(1e-15));
    CHECK(p1[0] == doctest::Approx(z[1]).epsilon(1e-15));

    const auto traj = rk4_integrate(H, Q0, P0, 0.01, 10, 4);
    REQUIRE(traj.size() == 4);
    CHECK(traj.time(3) == doctest::Approx(0.1));
    const Vec z10 = rk4(product_field, {-3.0, 0.0}, 0.01, 10);
    CHECK(traj.back().q()[0] == doctest::Approx(z10[0]).epsilon(1e-14));

    // Fourth order on the exact solution.
    ProductExactSolution exact(-3.0);
    auto err = [&](double h) {
        const auto t = rk4_integrate(H, Q0, P0, h, static_cast<std::size_t>(std::llround(1.0 / h)), 1000000);
        return std::abs(t.back().q()[0] - exact(1.0).first);
    };
    CHECK(std::log2(err(0.002) / err(0.001)) == doctest::Approx(4.0).epsilon(0.1));
    CHECK_THROWS_AS(rk4_integrate(H, Q0, P0, 0.01, 10, 0), std::invalid_argument);
}

TEST_CASE("cn by inversion of the incomplete elliptic integral")
{
    // u = F(phi | m) = integral_0^phi dtheta / sqrt(1 - m sin^2 theta); cn(u | m) = cos(phi).
    const double m = 0.9, u = 1.0;
    auto F = [m](double phi) {
        const int n = 4000;
        const double h = phi / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double th = i * h;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w / std::sqrt(1.0 - m * std::sin(th) * std::sin(th));
        }
        return s * h / 3.0;
    };
    double lo = 0.0, hi = M_PI / 2;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < u ? lo : hi) = mid;
    }
    CHECK(jacobi_cn(u, m) == doctest::Approx(std::cos(0.5 * (lo + hi))).epsilon(1e-12));
    for (double mm : {0.0, 0.5, 0.99}) {
        CHECK(jacobi_cn(0.0, mm) == 1.0);
    }
    for (double uu : {0.3, 1.0, 2.5}) {
        CHECK(std::abs(jacobi_cn(uu, 0.0) - std::cos(uu)) <= 1e-13);
    }
}

TEST_CASE("exact solution: small amplitude limit, periodicity and spot value")
{
    CHECK(half_period(-1e-6) == doctest::Approx(M_PI).epsilon(1e-12));
    ProductExactSolution exact(-3.0);
    const double period = 2.0 * exact.params().half_period;
    const auto [qp, pp] = exact(period);
    CHECK(std::abs(qp + 3.0) <= 1e-10);
    CHECK(std::abs(pp) <= 1e-10);
    for (int i = 0; i < 100; ++i) {
        const double t = uniform(0.0, 50.0);
        const auto a = exact(t), b = exact(t + period);
        CHECK(std::abs(a.first - b.first) <= 1e-10);
        CHECK(std::abs(a.second - b.second) <= 1e-10);
        CHECK(std::abs(0.5 * (a.first * a.first + 1) * (a.second * a.second + 1) - 5.0) <= 1e-11);
    }
    ProductHamiltonian H;
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto ref = reference_flow(H, Q0, P0, 0.7);
    const auto [q, p] = exact(0.7);
    CHECK(std::abs(ref.trajectory.back().q()[0] - q) <= 1e-9);
    CHECK(std::abs(ref.trajectory.back().p()[0] - p) <= 1e-9);
}

TEST_CASE("reference flow edge cases and Schwarzschild benchmark quality")
{
    ProductHamiltonian H;
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto zero = reference_flow(H, Q0, P0, 0.0);
    CHECK(zero.trajectory.back().q()[0] == -3.0);
    CHECK(zero.trajectory.back().p()[0] == 0.0);

    const auto undamped = ForceModel::linear_damping(0.0);
    const auto a = reference_flow(H, Q0, P0, 3.0);
    const auto b = reference_dissipative(H, undamped, Q0, P0, 3.0);
    CHECK(a.trajectory.back().q()[0] == doctest::Approx(b.trajectory.back().q()[0]).epsilon(1e-12));

    SchwarzschildHamiltonian S;
    const auto ic = schwarzschild_initial_condition(SchwarzschildPreset::constraint);
    ReferenceOptions opt;
    opt.samples = 100;
    const auto ref = reference_flow(S, ic.q, ic.p, 1000.0, opt);
    double drift = 0.0;
    for (std::size_t i = 0; i < ref.trajectory.size(); ++i) {
        drift = std::max(drift, std::abs(S.energy(ref.trajectory.at(i).q(), ref.trajectory.at(i).p()) - 0.5));
    }
    CHECK(drift < 1e-10);

    const auto damping = ForceModel::linear_damping(1e-4);
    const auto diss = reference_dissipative(S, damping, ic.q, ic.p, 1000.0, opt);
    for (std::size_t i = 0; i < diss.trajectory.size(); ++i) {
        CHECK(diss.trajectory.at(i).q()[1] > 2.0);
        CHECK(diss.trajectory.at(i).q()[1] < 40.0);
    }
}

TEST_CASE("RK4 step on linear systems")
{
    HarmonicOscillator H(1);
    const double Q[] = {0.6}, P[] = {-0.8};
    const auto [q0, p0] = rk4_step(H, Q, P, 0.0);
    CHECK(q0[0] == 0.6);
    CHECK(p0[0] == -0.8);
    // Degree-4 Taylor polynomial of the rotation by h.
    const double h = 0.3;
    const double c = 1 - h * h / 2 + h * h * h * h / 24, s = h - h * h * h / 6;
    const auto [q, p] = rk4_step(H, Q, P, h);
    CHECK(q[0] == doctest::Approx(c * Q[0] + s * P[0]).epsilon(1e-15));
    CHECK(p[0] == doctest::Approx(-s * Q[0] + c * P[0]).epsilon(1e-15));
}
