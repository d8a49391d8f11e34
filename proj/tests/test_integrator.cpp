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
#include "tether/integrator.hpp"
#include "tether/models.hpp"

using namespace tether;
using namespace tether::testing;

namespace {

/// Harmonic oscillator that refuses positions above a wall.
class WalledOscillator final : public HamiltonianModel {
public:
    std::size_t dim() const noexcept override { return 1; }
    std::string_view name() const noexcept override { return "walled"; }
    double energy(std::span<const double> a, std::span<const double> b) const override
    {
        check(a);
        return 0.5 * (a[0] * a[0] + b[0] * b[0]);
    }
    void grad_a(std::span<const double> a, std::span<const double>, std::span<double> out) const override
    {
        check(a);
        out[0] = a[0];
    }
    void grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const override
    {
        check(a);
        out[0] = b[0];
    }

private:
    static void check(std::span<const double> a)
    {
        if (a[0] > 0.5) {
            throw DomainError("past the wall");
        }
    }
};

double product_energy(double a, double b)
{
    return 0.5 * (a * a + 1.0) * (b * b + 1.0);
}

} // namespace

TEST_CASE("second-order scheme is the symmetric Strang splitting")
{
    const auto s = build_scheme(2);
    REQUIRE(s.size() == 5);
    CHECK(s.order == 2);
    const char* kinds = "ABCBA";
    const double fractions[] = {0.5, 0.5, 1.0, 0.5, 0.5};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(to_char(s.stages[i].kind) == kinds[i]);
        CHECK(s.stages[i].fraction == fractions[i]);
    }
}

TEST_CASE("triple jump composition merges adjacent stages")
{
    for (int order : {4, 6, 8}) {
        const auto s = build_scheme(order);
        CAPTURE(order);
        CHECK(s.order == order);
        CHECK(s.is_palindromic());
        CHECK(s.total_fraction(StageKind::A) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s.total_fraction(StageKind::B) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s.total_fraction(StageKind::C) == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t i = 1; i < s.size(); ++i) {
            CHECK(s.stages[i].kind != s.stages[i - 1].kind);
        }
    }
    const auto s4 = build_scheme(4);
    CHECK(s4.size() == 13);
    CHECK(s4.gradient_stages() == 10);
    CHECK(s4.reversed().stages == s4.stages);
}

TEST_CASE("triple jump gamma")
{
    CHECK(triple_jump_gamma(4) == doctest::Approx(1.3512071919596578).epsilon(1e-15));
    CHECK(triple_jump_gamma(4) == doctest::Approx(1.0 / (2.0 - std::cbrt(2.0))).epsilon(1e-15));
    CHECK(triple_jump_gamma(6) == doctest::Approx(1.0 / (2.0 - std::pow(2.0, 0.2))).epsilon(1e-15));
    CHECK(triple_jump_gamma(4, GammaVariant::printed) == doctest::Approx(1.0 / (2.0 - std::pow(2.0, 0.2))));
    CHECK_THROWS_AS(triple_jump_gamma(3), std::invalid_argument);
    CHECK_THROWS_AS(triple_jump_gamma(2), std::invalid_argument);
    CHECK_THROWS_AS(build_scheme(0), std::invalid_argument);
    CHECK_THROWS_AS(build_scheme(5), std::invalid_argument);
}

TEST_CASE("parsers for enum options")
{
    CHECK(parse_gamma_variant("printed") == GammaVariant::printed);
    CHECK(parse_restraint_rate("omega") == RestraintRate::omega);
    CHECK(to_string(parse_restraint_rate("twice_omega")) == "twice_omega");
    CHECK_THROWS_AS(parse_gamma_variant("other"), std::invalid_argument);
    CHECK_THROWS_AS(parse_restraint_rate(""), std::invalid_argument);
    IntegratorConfig cfg;
    cfg.omega = 8.0;
    CHECK(cfg.binding() == 8.0);
    cfg.restraint_rate = RestraintRate::omega;
    CHECK(cfg.binding() == 4.0);
}

TEST_CASE("flow_a and flow_b are exact shears of the mixed copies")
{
    ProductHamiltonian H;
    const double h = 0.37;
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_state(1, -2.0, 2.0);
        // Gradients by central differences of the energy.
        const double e = 1e-6;
        const double dHa_qy = (product_energy(s.q[0] + e, s.y[0]) - product_energy(s.q[0] - e, s.y[0])) / (2 * e);
        const double dHb_qy = (product_energy(s.q[0], s.y[0] + e) - product_energy(s.q[0], s.y[0] - e)) / (2 * e);
        const auto a = flow_a(s, h, H);
        CHECK(a.q[0] == s.q[0]);
        CHECK(a.y[0] == s.y[0]);
        CHECK(a.x[0] == doctest::Approx(s.x[0] + h * dHb_qy).epsilon(1e-8));
        CHECK(a.p[0] == doctest::Approx(s.p[0] - h * dHa_qy).epsilon(1e-8));

        const double dHa_xp = (product_energy(s.x[0] + e, s.p[0]) - product_energy(s.x[0] - e, s.p[0])) / (2 * e);
        const double dHb_xp = (product_energy(s.x[0], s.p[0] + e) - product_energy(s.x[0], s.p[0] - e)) / (2 * e);
        const auto b = flow_b(s, h, H);
        CHECK(b.x[0] == s.x[0]);
        CHECK(b.p[0] == s.p[0]);
        CHECK(b.q[0] == doctest::Approx(s.q[0] + h * dHb_xp).epsilon(1e-8));
        CHECK(b.y[0] == doctest::Approx(s.y[0] - h * dHa_xp).epsilon(1e-8));
    }
}

TEST_CASE("flow_c rotates differences and keeps sums")
{
    const auto s = random_state(3, -1.0, 1.0);
    const double omega = 5.0, h = 0.113;
    const auto c = flow_c(s, h, omega);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(c.q[i] + c.x[i] == doctest::Approx(s.q[i] + s.x[i]).epsilon(1e-14));
        CHECK(c.p[i] + c.y[i] == doctest::Approx(s.p[i] + s.y[i]).epsilon(1e-14));
        const double d0 = std::hypot(s.q[i] - s.x[i], s.p[i] - s.y[i]);
        const double d1 = std::hypot(c.q[i] - c.x[i], c.p[i] - c.y[i]);
        CHECK(d1 == doctest::Approx(d0).epsilon(1e-14));
        // Angle 2 omega h, clockwise in the (position, momentum) difference plane.
        const double a0 = std::atan2(s.p[i] - s.y[i], s.q[i] - s.x[i]);
        const double a1 = std::atan2(c.p[i] - c.y[i], c.q[i] - c.x[i]);
        CHECK(std::remainder(a0 - a1 - 2 * omega * h, 2 * M_PI) == doctest::Approx(0.0).epsilon(1e-12));
    }
    const auto back = flow_c(c, -h, omega);
    CHECK(max_abs_diff(to_canonical(back), to_canonical(s)) < 1e-14);
}

TEST_CASE("composed steps are symplectic")
{
    ProductHamiltonian product;
    NlsHamiltonian nls(2);
    for (int order : {2, 4}) {
        for (const HamiltonianModel* model : {static_cast<const HamiltonianModel*>(&product),
                                              static_cast<const HamiltonianModel*>(&nls)}) {
            IntegratorConfig cfg;
            cfg.delta = 0.05;
            cfg.omega = 10.0;
            cfg.order = order;
            const auto scheme = build_scheme(order);
            for (int trial = 0; trial < 5; ++trial) {
                const auto s0 = random_state(model->dim(), -1.5, 1.5);
                const Map f = [&](const Vec& z) { return to_canonical(step(from_canonical(z), cfg, scheme, *model)); };
                CAPTURE(order);
                CHECK(symplectic_defect(fd_jacobian(f, to_canonical(s0))) < 1e-6);
            }
        }
    }
}

TEST_CASE("symmetric schemes are time reversible")
{
    NlsHamiltonian nls(3);
    const auto scheme = build_scheme(4);
    Stepper stepper(nls, scheme, 7.0);
    const auto s0 = random_state(3, -1.0, 1.0);
    auto s = s0;
    stepper.advance(s, 0.02);
    CHECK(max_abs_diff(to_canonical(s), to_canonical(s0)) > 1e-4);
    stepper.advance(s, -0.02);
    CHECK(max_abs_diff(to_canonical(s), to_canonical(s0)) < 1e-13);
}

TEST_CASE("integrate samples on the stride grid and keeps the end point")
{
    ProductHamiltonian H;
    IntegratorConfig cfg;
    cfg.delta = 0.01;
    cfg.n_steps = 10;
    IntegrateOptions opt;
    opt.stride = 3;
    std::vector<double> seen;
    opt.observers.push_back([&](double t, const ExtendedState&) { seen.push_back(t); });
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto traj = integrate(Q0, P0, cfg, H, opt);
    REQUIRE(traj.ok());
    CHECK(traj.size() == 5);
    CHECK(traj.times() == seen);
    CHECK(traj.time(4) == doctest::Approx(0.1));
    CHECK(traj.last_valid_step == 10);
    const auto first = traj.at(0).to_state();
    CHECK(first == ExtendedState::embed(Q0, P0));
}

TEST_CASE("integrate is bit-for-bit deterministic")
{
    NlsHamiltonian nls(4);
    IntegratorConfig cfg;
    cfg.delta = 0.01;
    cfg.omega = 50.0;
    cfg.n_steps = 500;
    const auto ic = nls_initial_condition(4);
    const auto a = integrate(ic.q, ic.p, cfg, nls);
    const auto b = integrate(ic.q, ic.p, cfg, nls);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto sa = a.at(i).to_state(), sb = b.at(i).to_state();
        CHECK(sa == sb);
    }
}

TEST_CASE("integrate reports escape and evaluation failures")
{
    ProductHamiltonian H;
    IntegratorConfig cfg;
    cfg.delta = 0.01;
    cfg.n_steps = 100;
    IntegrateOptions opt;
    opt.escape_bound = 2.0;
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto escaped = integrate(Q0, P0, cfg, H, opt);
    CHECK(escaped.outcome == Outcome::escaped);
    CHECK(escaped.last_valid_step == 0);
    CHECK(escaped.size() == 1);

    WalledOscillator walled;
    cfg.omega = 0.0;
    const double q0[] = {0.0}, p0[] = {1.0};
    const auto failed = integrate(q0, p0, cfg, walled);
    CHECK(failed.outcome == Outcome::step_failed);
    // sin t reaches 0.5 at t = pi / 6.
    CHECK(failed.last_valid_step == 52);
    CHECK(failed.back().q()[0] <= 0.5);
    CHECK(failed.message.find("past the wall") != std::string::npos);
}

TEST_CASE("integrate validates its inputs")
{
    ProductHamiltonian H;
    IntegratorConfig cfg;
    cfg.n_steps = 1;
    const double Q0[] = {1.0}, P0[] = {0.0};
    const double Q2[] = {1.0, 2.0};
    cfg.delta = 0.0;
    CHECK_THROWS_AS(integrate(Q0, P0, cfg, H), std::invalid_argument);
    cfg.delta = 0.1;
    cfg.omega = -1.0;
    CHECK_THROWS_AS(integrate(Q0, P0, cfg, H), std::invalid_argument);
    cfg.omega = 1.0;
    cfg.order = 3;
    CHECK_THROWS_AS(integrate(Q0, P0, cfg, H), std::invalid_argument);
    cfg.order = 2;
    CHECK_THROWS_AS(integrate(Q2, P0, cfg, H), std::invalid_argument);
    IntegrateOptions opt;
    opt.stride = 0;
    CHECK_THROWS_AS(integrate(Q0, P0, cfg, H, opt), std::invalid_argument);
    cfg.n_steps = 0;
    const auto traj = integrate(Q0, P0, cfg, H);
    CHECK(traj.size() == 1);
    CHECK(traj.ok());
}

TEST_CASE("order of accuracy on the harmonic oscillator")
{
    HarmonicOscillator H(1);
    const double T = 2.0;
    for (int order : {2, 4, 6}) {
        auto error = [&](double delta) {
            IntegratorConfig cfg;
            cfg.delta = delta;
            cfg.omega = 5.0;
            cfg.order = order;
            cfg.n_steps = static_cast<std::size_t>(std::llround(T / delta));
            const double Q0[] = {1.0}, P0[] = {0.0};
            const auto traj = integrate(Q0, P0, cfg, H);
            const auto end = traj.back();
            return std::hypot(end.q()[0] - std::cos(T), end.p()[0] + std::sin(T));
        };
        const double rate = std::log2(error(0.02) / error(0.01));
        CAPTURE(order);
        CHECK(rate == doctest::Approx(order).epsilon(0.1));
    }
}

TEST_CASE("extended energy stays close over many periods")
{
    ProductHamiltonian H;
    IntegratorConfig cfg;
    cfg.delta = 0.01;
    cfg.omega = 20.0;
    cfg.n_steps = 10000;
    const double Q0[] = {-3.0}, P0[] = {0.0};
    const auto traj = integrate(Q0, P0, cfg, H);
    const double h0 = extended_energy(traj.at(0), H, cfg.binding());
    CHECK(h0 == doctest::Approx(2 * product_energy(-3.0, 0.0)));
    double drift = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        drift = std::max(drift, std::abs(extended_energy(traj.at(i), H, cfg.binding()) - h0));
    }
    CHECK(drift < 1e-3);
}

TEST_CASE("linear damping matches the damped oscillator")
{
    HarmonicOscillator H(1);
    const double gamma = 0.3, T = 5.0;
    const auto force = ForceModel::linear_damping(gamma);
    IntegratorConfig cfg;
    cfg.delta = 0.001;
    cfg.omega = 5.0;
    cfg.n_steps = 5000;
    IntegrateOptions opt;
    opt.force = &force;
    const double Q0[] = {1.0}, P0[] = {0.0};
    const auto traj = integrate(Q0, P0, cfg, H, opt);
    // q'' + gamma q' + q = 0, q(0) = 1, q'(0) = 0.
    const double w = std::sqrt(1.0 - gamma * gamma / 4.0);
    const double q = std::exp(-gamma * T / 2) * (std::cos(w * T) + gamma / (2 * w) * std::sin(w * T));
    CHECK(traj.back().q()[0] == doctest::Approx(q).epsilon(1e-4));
}
