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

#include "tether/models.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace tether {

std::vector<double> HamiltonianModel::grad_a(std::span<const double> a, std::span<const double> b) const
{
    std::vector<double> out(dim());
    grad_a(a, b, out);
    return out;
}

std::vector<double> HamiltonianModel::grad_b(std::span<const double> a, std::span<const double> b) const
{
    std::vector<double> out(dim());
    grad_b(a, b, out);
    return out;
}

// Product model

double ProductHamiltonian::energy(std::span<const double> a, std::span<const double> b) const
{
    return 0.5 * (a[0] * a[0] + 1.0) * (b[0] * b[0] + 1.0);
}

void ProductHamiltonian::grad_a(std::span<const double> a, std::span<const double> b, std::span<double> out) const
{
    out[0] = a[0] * (b[0] * b[0] + 1.0);
}

void ProductHamiltonian::grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const
{
    out[0] = b[0] * (a[0] * a[0] + 1.0);
}

// Schwarzschild

namespace {

double checked_radius(std::span<const double> a)
{
    const double r = a[1];
    if (!std::isfinite(r) || r == 0.0) {
        throw DomainError(fmt::format("schwarzschild: singular radius r = {}", r));
    }
    if (r <= 2.0 + SchwarzschildHamiltonian::horizon_margin) {
        throw DomainError(fmt::format("schwarzschild: inside horizon (r = {})", r));
    }
    return r;
}

} // namespace

double SchwarzschildHamiltonian::energy(std::span<const double> a, std::span<const double> b) const
{
    const double r = checked_radius(a);
    const double f = 1.0 - 2.0 / r;
    return 0.5 * (b[0] * b[0] / f - f * b[1] * b[1] - b[2] * b[2] / (r * r));
}

void SchwarzschildHamiltonian::grad_a(std::span<const double> a, std::span<const double> b,
                                      std::span<double> out) const
{
    const double r = checked_radius(a);
    const double f = 1.0 - 2.0 / r;
    const double df = 2.0 / (r * r);
    out[0] = 0.0;
    out[1] = 0.5 * (-df * b[0] * b[0] / (f * f) - df * b[1] * b[1] + 2.0 * b[2] * b[2] / (r * r * r));
    out[2] = 0.0;
}

void SchwarzschildHamiltonian::grad_b(std::span<const double> a, std::span<const double> b,
                                      std::span<double> out) const
{
    const double r = checked_radius(a);
    const double f = 1.0 - 2.0 / r;
    out[0] = b[0] / f;
    out[1] = -f * b[1];
    out[2] = -b[2] / (r * r);
}

SchwarzschildPreset parse_schwarzschild_preset(const std::string& name)
{
    if (name == "paper") {
        return SchwarzschildPreset::paper;
    }
    if (name == "constraint") {
        return SchwarzschildPreset::constraint;
    }
    throw std::invalid_argument("unknown schwarzschild preset '" + name + "' (expected paper or constraint)");
}

std::string to_string(SchwarzschildPreset preset)
{
    return preset == SchwarzschildPreset::paper ? "paper" : "constraint";
}

double schwarzschild_energy_momentum(double r, double p_r, double p_phi, double m)
{
    if (r <= 2.0 + SchwarzschildHamiltonian::horizon_margin) {
        throw DomainError(fmt::format("schwarzschild: inside horizon (r = {})", r));
    }
    const double f = 1.0 - 2.0 / r;
    // m^2 = p_t^2 / f - f p_r^2 - p_phi^2 / r^2
    const double pt2 = f * (m * m + f * p_r * p_r + p_phi * p_phi / (r * r));
    return std::sqrt(pt2);
}

PhaseInitialCondition schwarzschild_initial_condition(SchwarzschildPreset preset)
{
    const double r0 = 20.0;
    const double p_phi = -std::sqrt(r0);
    const double p_t = preset == SchwarzschildPreset::paper ? 0.982 : schwarzschild_energy_momentum(r0, 0.0, p_phi);
    return {{0.0, r0, 0.0}, {p_t, 0.0, p_phi}};
}

// NLS

NlsHamiltonian::NlsHamiltonian(std::size_t modes) : modes_(modes)
{
    if (modes < 2) {
        throw std::invalid_argument(fmt::format("nls: need at least 2 modes, got {}", modes));
    }
}

double NlsHamiltonian::energy(std::span<const double> q, std::span<const double> p) const
{
    double quartic = 0.0;
    for (std::size_t i = 0; i < modes_; ++i) {
        const double m = q[i] * q[i] + p[i] * p[i];
        quartic += m * m;
    }
    double coupling = 0.0;
    for (std::size_t i = 1; i < modes_; ++i) {
        const double q0 = q[i - 1], p0 = p[i - 1], q1 = q[i], p1 = p[i];
        coupling += p0 * p0 * p1 * p1 + q0 * q0 * q1 * q1 - q0 * q0 * p1 * p1 - p0 * p0 * q1 * q1
                    + 4.0 * p0 * p1 * q0 * q1;
    }
    return 0.25 * quartic - coupling;
}

void NlsHamiltonian::grad_a(std::span<const double> q, std::span<const double> p, std::span<double> out) const
{
    for (std::size_t i = 0; i < modes_; ++i) {
        out[i] = (q[i] * q[i] + p[i] * p[i]) * q[i];
    }
    // Bond (i-1, i) contributes to both of its endpoints.
    for (std::size_t i = 1; i < modes_; ++i) {
        const double q0 = q[i - 1], p0 = p[i - 1], q1 = q[i], p1 = p[i];
        out[i - 1] -= 2.0 * q0 * q1 * q1 - 2.0 * q0 * p1 * p1 + 4.0 * p0 * p1 * q1;
        out[i] -= 2.0 * q0 * q0 * q1 - 2.0 * p0 * p0 * q1 + 4.0 * p0 * p1 * q0;
    }
}

void NlsHamiltonian::grad_b(std::span<const double> q, std::span<const double> p, std::span<double> out) const
{
    for (std::size_t i = 0; i < modes_; ++i) {
        out[i] = (q[i] * q[i] + p[i] * p[i]) * p[i];
    }
    for (std::size_t i = 1; i < modes_; ++i) {
        const double q0 = q[i - 1], p0 = p[i - 1], q1 = q[i], p1 = p[i];
        out[i - 1] -= 2.0 * p0 * p1 * p1 - 2.0 * p0 * q1 * q1 + 4.0 * p1 * q0 * q1;
        out[i] -= 2.0 * p0 * p0 * p1 - 2.0 * q0 * q0 * p1 + 4.0 * p0 * q0 * q1;
    }
}

NlsObservables nls_masses(std::span<const double> q, std::span<const double> p)
{
    if (q.size() != p.size()) {
        throw std::invalid_argument("nls_masses: q and p lengths differ");
    }
    NlsObservables obs;
    obs.masses.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        obs.masses[i] = q[i] * q[i] + p[i] * p[i];
        obs.total += obs.masses[i];
    }
    return obs;
}

PhaseInitialCondition nls_initial_condition(std::size_t modes)
{
    if (modes < 2) {
        throw std::invalid_argument(fmt::format("nls: need at least 2 modes, got {}", modes));
    }
    PhaseInitialCondition ic{std::vector<double>(modes, 0.01), std::vector<double>(modes, 0.0)};
    ic.q[0] = 3.0;
    ic.p[0] = 1.0;
    return ic;
}

// Harmonic oscillator

double HarmonicOscillator::energy(std::span<const double> a, std::span<const double> b) const
{
    double sum = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        sum += a[i] * a[i] + b[i] * b[i];
    }
    return 0.5 * sum;
}

void HarmonicOscillator::grad_a(std::span<const double> a, std::span<const double>, std::span<double> out) const
{
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = a[i];
    }
}

void HarmonicOscillator::grad_b(std::span<const double>, std::span<const double> b, std::span<double> out) const
{
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = b[i];
    }
}

std::unique_ptr<HamiltonianModel> make_model(const std::string& name, std::size_t modes)
{
    if (name == "product1d") {
        return std::make_unique<ProductHamiltonian>();
    }
    if (name == "schwarzschild") {
        return std::make_unique<SchwarzschildHamiltonian>();
    }
    if (name == "nls") {
        return std::make_unique<NlsHamiltonian>(modes);
    }
    if (name == "harmonic") {
        return std::make_unique<HarmonicOscillator>(modes);
    }
    throw std::invalid_argument("unknown system '" + name + "' (expected product1d, schwarzschild, nls or harmonic)");
}

} // namespace tether
