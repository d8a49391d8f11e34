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

#include "tether/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tether/elliptic.hpp"

namespace tether {

EllipticParams elliptic_params(double Q0)
{
    if (Q0 == 0.0 || !std::isfinite(Q0)) {
        throw std::invalid_argument(fmt::format("elliptic_params: Q0 must be finite and nonzero, got {}", Q0));
    }
    const double q2 = Q0 * Q0;
    // pi 2F1(1/2, 1/2; 1; -q2) = 2 K(-q2) = pi / agm(1, sqrt(1 + q2))
    return EllipticParams{Q0, q2 / (1.0 + q2), std::numbers::pi / agm(1.0, std::sqrt(1.0 + q2))};
}

double half_period(double Q0)
{
    return elliptic_params(Q0).half_period;
}

double half_period_quadrature(double Q0)
{
    if (Q0 == 0.0 || !std::isfinite(Q0)) {
        throw std::invalid_argument(fmt::format("half_period_quadrature: Q0 must be finite and nonzero, got {}", Q0));
    }
    // Q = |Q0| sin(theta) in dt = dQ / ((1 + Q^2)^(1/2) (Q0^2 - Q^2)^(1/2))
    // leaves 2 * integral_0^(pi/2) dtheta / sqrt(1 + Q0^2 sin^2 theta).
    return 2.0 * elliptic_k_quadrature(-Q0 * Q0, 2048);
}

ProductExactSolution::ProductExactSolution(double Q0)
    : params_(elliptic_params(Q0)), rate_(std::sqrt(1.0 + Q0 * Q0))
{
}

std::pair<double, double> ProductExactSolution::operator()(double t) const
{
    const double half = params_.half_period;
    double tau = std::fmod(t, 2.0 * half);
    if (tau < 0.0) {
        tau += 2.0 * half;
    }
    double sign = 1.0;
    if (tau >= half) {
        tau -= half;
        sign = -1.0;
    }
    const auto jac = jacobi_elliptic(tau * rate_, params_.m);
    const double Q = params_.q0 * jac.cn;
    // dQ/dt = -Q0 sn dn sqrt(1 + Q0^2), and dQ/dt = dH/dP = P (1 + Q^2).
    const double Qdot = -params_.q0 * jac.sn * jac.dn * rate_;
    const double P = Qdot / (1.0 + Q * Q);
    return {sign * Q, sign * P};
}

PhaseTrajectory ProductExactSolution::sample(std::span<const double> times) const
{
    PhaseTrajectory out(1);
    for (double t : times) {
        const auto [Q, P] = (*this)(t);
        const double q[1] = {Q};
        const double p[1] = {P};
        out.push_back(t, q, p);
    }
    return out;
}

std::pair<double, double> exact_solution(double Q0, double t)
{
    return ProductExactSolution(Q0)(t);
}

namespace {

/// Canonical vector field z = (Q, P) -> (dH/dP, -dH/dQ + F).
class CanonicalField {
public:
    CanonicalField(const HamiltonianModel& model, const ForceModel* force)
        : model_(model), force_(force != nullptr && force->external_force ? force : nullptr), d_(model.dim()),
          buf_(model.dim())
    {
    }

    std::size_t size() const noexcept { return 2 * d_; }

    void operator()(double t, std::span<const double> z, std::span<double> dz)
    {
        const auto Q = z.subspan(0, d_);
        const auto P = z.subspan(d_, d_);
        model_.grad_b(Q, P, dz.subspan(0, d_));
        model_.grad_a(Q, P, dz.subspan(d_, d_));
        for (std::size_t i = d_; i < 2 * d_; ++i) {
            dz[i] = -dz[i];
        }
        if (force_ != nullptr) {
            force_->external_force(Q, P, t, buf_);
            for (std::size_t i = 0; i < d_; ++i) {
                dz[d_ + i] += buf_[i];
            }
        }
        for (std::size_t i = 0; i < 2 * d_; ++i) {
            if (!std::isfinite(dz[i])) {
                throw EvaluationError(fmt::format("rk4: non-finite derivative component {}", i));
            }
        }
    }

private:
    const HamiltonianModel& model_;
    const ForceModel* force_;
    std::size_t d_;
    std::vector<double> buf_;
};

class Rk4 {
public:
    explicit Rk4(CanonicalField& field)
        : field_(field), k1_(field.size()), k2_(field.size()), k3_(field.size()), k4_(field.size()),
          tmp_(field.size()), comp_(field.size(), 0.0)
    {
    }

    /// z <- z + h * (k1 + 2 k2 + 2 k3 + k4) / 6, with Kahan compensation
    /// across calls when `compensated` is set.
    void advance(double t, std::vector<double>& z, double h, bool compensated)
    {
        const auto n = z.size();
        field_(t, z, k1_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = z[i] + 0.5 * h * k1_[i];
        }
        field_(t + 0.5 * h, tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = z[i] + 0.5 * h * k2_[i];
        }
        field_(t + 0.5 * h, tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = z[i] + h * k3_[i];
        }
        field_(t + h, tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i) {
            const double incr = h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
            if (compensated) {
                const double y = incr - comp_[i];
                const double sum = z[i] + y;
                comp_[i] = (sum - z[i]) - y;
                z[i] = sum;
            } else {
                z[i] += incr;
            }
        }
    }

private:
    CanonicalField& field_;
    std::vector<double> k1_, k2_, k3_, k4_, tmp_, comp_;
};

std::vector<double> concat(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> z(a.begin(), a.end());
    z.insert(z.end(), b.begin(), b.end());
    return z;
}

PhaseTrajectory run_fixed(CanonicalField& field, std::span<const double> Q0, std::span<const double> P0, double T,
                          std::size_t samples, std::size_t substeps)
{
    const std::size_t d = Q0.size();
    Rk4 rk(field);
    std::vector<double> z = concat(Q0, P0);
    PhaseTrajectory traj(d);
    traj.push_back(0.0, Q0, P0);
    const std::size_t total = samples * substeps;
    const double h = T / static_cast<double>(total);
    for (std::size_t k = 1; k <= total; ++k) {
        rk.advance(static_cast<double>(k - 1) * h, z, h, true);
        if (k % substeps == 0) {
            const double t = T * static_cast<double>(k / substeps) / static_cast<double>(samples);
            traj.push_back(t, std::span<const double>(z).subspan(0, d), std::span<const double>(z).subspan(d, d));
        }
    }
    return traj;
}

double endpoint_change(const PhaseTrajectory& coarse, const PhaseTrajectory& fine)
{
    const auto a = coarse.back();
    const auto b = fine.back();
    double diff = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        diff = std::max({diff, std::abs(a.q()[i] - b.q()[i]), std::abs(a.p()[i] - b.p()[i])});
        scale = std::max({scale, std::abs(b.q()[i]), std::abs(b.p()[i])});
    }
    return diff / scale;
}

ReferenceResult run_reference(const HamiltonianModel& model, const ForceModel* force, std::span<const double> Q0,
                              std::span<const double> P0, double T, const ReferenceOptions& options)
{
    if (Q0.size() != model.dim() || P0.size() != model.dim()) {
        throw std::invalid_argument("reference_flow: initial condition dimension does not match model");
    }
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument(fmt::format("reference_flow: T must be finite and >= 0, got {}", T));
    }
    if (options.samples == 0) {
        throw std::invalid_argument("reference_flow: samples must be >= 1");
    }
    CanonicalField field(model, force);
    if (T == 0.0) {
        PhaseTrajectory traj(model.dim());
        traj.push_back(0.0, Q0, P0);
        return {std::move(traj), ReferenceCertificate{0.0, 0, 0, 0.0, true}};
    }

    const double sample_dt = T / static_cast<double>(options.samples);
    auto substeps = static_cast<std::size_t>(std::ceil(sample_dt / options.initial_step));
    substeps = std::max<std::size_t>(substeps, 1);

    PhaseTrajectory coarse = run_fixed(field, Q0, P0, T, options.samples, substeps);
    double change = 0.0;
    for (int refinement = 1; refinement <= options.max_refinements; ++refinement) {
        substeps *= 2;
        PhaseTrajectory fine = run_fixed(field, Q0, P0, T, options.samples, substeps);
        change = endpoint_change(coarse, fine);
        if (change <= options.rel_tol) {
            ReferenceCertificate cert{sample_dt / static_cast<double>(substeps), substeps, refinement, change, true};
            return {std::move(fine), cert};
        }
        coarse = std::move(fine);
    }
    throw ReferenceDidNotConverge(fmt::format("reference did not converge: endpoint change {:.3e} > {:.3e} after {} "
                                              "refinements",
                                              change, options.rel_tol, options.max_refinements));
}

} // namespace

ReferenceResult reference_flow(const HamiltonianModel& model, std::span<const double> Q0, std::span<const double> P0,
                               double T, const ReferenceOptions& options)
{
    return run_reference(model, nullptr, Q0, P0, T, options);
}

ReferenceResult reference_dissipative(const HamiltonianModel& model, const ForceModel& force,
                                      std::span<const double> Q0, std::span<const double> P0, double T,
                                      const ReferenceOptions& options)
{
    return run_reference(model, &force, Q0, P0, T, options);
}

std::pair<std::vector<double>, std::vector<double>> rk4_step(const HamiltonianModel& model,
                                                             std::span<const double> Q, std::span<const double> P,
                                                             double delta, const ForceModel* force, double t)
{
    if (Q.size() != model.dim() || P.size() != model.dim()) {
        throw std::invalid_argument("rk4_step: state dimension does not match model");
    }
    CanonicalField field(model, force);
    Rk4 rk(field);
    std::vector<double> z = concat(Q, P);
    rk.advance(t, z, delta, false);
    const auto d = model.dim();
    return {std::vector<double>(z.begin(), z.begin() + d), std::vector<double>(z.begin() + d, z.end())};
}

PhaseTrajectory rk4_integrate(const HamiltonianModel& model, std::span<const double> Q0, std::span<const double> P0,
                              double delta, std::size_t n_steps, std::size_t stride, const ForceModel* force)
{
    if (Q0.size() != model.dim() || P0.size() != model.dim()) {
        throw std::invalid_argument("rk4_integrate: initial condition dimension does not match model");
    }
    if (stride == 0) {
        throw std::invalid_argument("rk4_integrate: stride must be >= 1");
    }
    const auto d = model.dim();
    CanonicalField field(model, force);
    Rk4 rk(field);
    std::vector<double> z = concat(Q0, P0);
    PhaseTrajectory traj(d);
    traj.push_back(0.0, Q0, P0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        rk.advance(static_cast<double>(k - 1) * delta, z, delta, false);
        if (k % stride == 0 || k == n_steps) {
            traj.push_back(static_cast<double>(k) * delta, std::span<const double>(z).subspan(0, d),
                           std::span<const double>(z).subspan(d, d));
        }
    }
    return traj;
}

} // namespace tether
