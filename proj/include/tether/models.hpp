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

#ifndef TETHER_MODELS_HPP
#define TETHER_MODELS_HPP

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tether/model.hpp"

namespace tether {

/// H(Q, P) = (Q^2 + 1)(P^2 + 1) / 2, one degree of freedom.
class ProductHamiltonian final : public HamiltonianModel {
public:
    std::size_t dim() const noexcept override { return 1; }
    std::string_view name() const noexcept override { return "product1d"; }
    double energy(std::span<const double> a, std::span<const double> b) const override;
    void grad_a(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    void grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    using HamiltonianModel::grad_a;
    using HamiltonianModel::grad_b;
};

/// Schwarzschild geodesics in units with 2M = 2 in the metric factor:
///
///     H = [ p_t^2 / f - f p_r^2 - p_phi^2 / r^2 ] / 2,   f = 1 - 2/r,
///
/// with Q = (t, r, phi) and P = (p_t, p_r, p_phi). Both t and phi are cyclic.
/// Evaluation throws DomainError for r <= 2 + horizon_margin.
class SchwarzschildHamiltonian final : public HamiltonianModel {
public:
    static constexpr double horizon_margin = 1e-9;

    std::size_t dim() const noexcept override { return 3; }
    std::string_view name() const noexcept override { return "schwarzschild"; }
    double energy(std::span<const double> a, std::span<const double> b) const override;
    void grad_a(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    void grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    using HamiltonianModel::grad_a;
    using HamiltonianModel::grad_b;
};

/// Initial data for the circular-orbit run at r = 20. The printed momentum
/// p_t = 0.982 and the value solving H = m^2/2 (about 0.97211) disagree, so
/// both are offered.
enum class SchwarzschildPreset { paper, constraint };

SchwarzschildPreset parse_schwarzschild_preset(const std::string& name);
std::string to_string(SchwarzschildPreset preset);

struct PhaseInitialCondition {
    std::vector<double> q;
    std::vector<double> p;
};

PhaseInitialCondition schwarzschild_initial_condition(SchwarzschildPreset preset);

/// p_t that puts (Q, P) on the shell H = m^2 / 2, given r, p_r and p_phi.
double schwarzschild_energy_momentum(double r, double p_r, double p_phi, double m = 1.0);

/// Truncated N-mode nonlinear Schroedinger system with nearest-neighbour
/// quartic coupling. Gradients use the O(N) closed-form stencil.
class NlsHamiltonian final : public HamiltonianModel {
public:
    explicit NlsHamiltonian(std::size_t modes);

    std::size_t dim() const noexcept override { return modes_; }
    std::string_view name() const noexcept override { return "nls"; }
    double energy(std::span<const double> a, std::span<const double> b) const override;
    void grad_a(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    void grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    using HamiltonianModel::grad_a;
    using HamiltonianModel::grad_b;

private:
    std::size_t modes_;
};

/// H = (|Q|^2 + |P|^2) / 2 in d dimensions.
class HarmonicOscillator final : public HamiltonianModel {
public:
    explicit HarmonicOscillator(std::size_t dim = 1) : dim_(dim) {}

    std::size_t dim() const noexcept override { return dim_; }
    std::string_view name() const noexcept override { return "harmonic"; }
    double energy(std::span<const double> a, std::span<const double> b) const override;
    void grad_a(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    void grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const override;
    using HamiltonianModel::grad_a;
    using HamiltonianModel::grad_b;

private:
    std::size_t dim_;
};

/// Model by configuration name: "product1d", "schwarzschild", "nls"
/// (with `modes` modes) or "harmonic" (with `modes` dimensions).
std::unique_ptr<HamiltonianModel> make_model(const std::string& name, std::size_t modes = 2);

struct NlsObservables {
    std::vector<double> masses;
    double total = 0.0;

    std::size_t modes() const noexcept { return masses.size(); }
};

/// Per-mode masses I_i = q_i^2 + p_i^2 and their sum.
NlsObservables nls_masses(std::span<const double> q, std::span<const double> p);

/// NLS initial data: mode 1 at (3, 1), every other mode at (0.01, 0).
PhaseInitialCondition nls_initial_condition(std::size_t modes);

} // namespace tether

#endif
