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

#ifndef TETHER_INTEGRATOR_HPP
#define TETHER_INTEGRATOR_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tether/model.hpp"
#include "tether/state.hpp"

namespace tether {

// Explicit symplectic integration of an arbitrary H(Q, P) in the doubled
// phase space (q, p, x, y). The extended Hamiltonian is
//
//     Hbar = H(q, y) + H(x, p) + omega * (|q - x|^2 + |p - y|^2) / 2
//
// and each of its three pieces has an exact, explicit flow. A step is a
// symmetric composition of those flows.

enum class StageKind : std::uint8_t { A, B, C };

char to_char(StageKind kind) noexcept;

struct Stage {
    StageKind kind;
    /// Substep length in units of the step size.
    double fraction;

    bool operator==(const Stage&) const = default;
};

struct CompositionScheme {
    std::vector<Stage> stages;
    int order = 2;

    std::size_t size() const noexcept { return stages.size(); }
    /// Sum of the fractions of all stages of one kind.
    double total_fraction(StageKind kind) const noexcept;
    bool is_palindromic() const noexcept;
    /// Stages in reverse order; with a negated step this is the adjoint.
    CompositionScheme reversed() const;
    /// Number of gradient-evaluating (A or B) stages.
    std::size_t gradient_stages() const noexcept;
};

/// Which exponent to use in the triple-jump coefficient.
/// `standard` is 1 / (2 - 2^(1/(l-1))), the value that raises a symmetric
/// method of order l-2 to order l. `printed` is 1 / (2 - 2^(1/(l+1))), kept
/// for comparison only: it does not cancel the leading error term.
enum class GammaVariant { standard, printed };

GammaVariant parse_gamma_variant(const std::string& name);
std::string to_string(GammaVariant variant);

/// Outer coefficient of the triple jump building order `order` from
/// order `order - 2`. Throws std::invalid_argument unless order is even and >= 4.
double triple_jump_gamma(int order, GammaVariant variant = GammaVariant::standard);

/// Order 2 is the palindrome A/2 B/2 C B/2 A/2. Higher orders are recursive
/// triple jumps of it, with adjacent stages of the same kind merged.
CompositionScheme build_scheme(int order, GammaVariant variant = GammaVariant::standard);

/// Rotation rate of the difference pair (q - x, p - y) under the restraint
/// flow, in units of omega. `twice_omega` is the exact flow of omega * H_C.
/// `omega` rotates at half that rate, so the effective binding constant is
/// omega / 2; error tables that quote the rotation rate as "omega" are
/// reproduced with it.
enum class RestraintRate { twice_omega, omega };

RestraintRate parse_restraint_rate(const std::string& name);
std::string to_string(RestraintRate rate);

struct IntegratorConfig {
    double delta = 0.01;
    double omega = 20.0;
    int order = 4;
    std::size_t n_steps = 0;
    GammaVariant gamma_variant = GammaVariant::standard;
    RestraintRate restraint_rate = RestraintRate::twice_omega;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    double final_time() const noexcept { return static_cast<double>(n_steps) * delta; }
    /// Coefficient of H_C in the extended Hamiltonian actually integrated.
    double binding() const noexcept { return restraint_rate == RestraintRate::omega ? 0.5 * omega : omega; }
};

/// Additive term on the momentum equations, F(position, momentum, t),
/// written into `out` (length d).
struct ForceModel {
    using Function = std::function<void(std::span<const double> position, std::span<const double> momentum, double t,
                                        std::span<double> out)>;
    Function external_force;

    /// F = -gamma * momentum.
    static ForceModel linear_damping(double gamma);
};

ExtendedState flow_a(const ExtendedState& s, double delta, const HamiltonianModel& model);
ExtendedState flow_b(const ExtendedState& s, double delta, const HamiltonianModel& model);
ExtendedState flow_c(const ExtendedState& s, double delta, double omega);

/// Hbar(q, p, x, y).
double extended_energy(const ExtendedState& s, const HamiltonianModel& model, double omega);
double extended_energy(const ExtendedStateView& s, const HamiltonianModel& model, double omega);

/// Reusable stepping engine. Holds scratch buffers, so one instance must not
/// be shared between threads; create one per trajectory.
class Stepper {
public:
    Stepper(const HamiltonianModel& model, CompositionScheme scheme, double omega, const ForceModel* force = nullptr);

    /// Advances `s` in place by one composed step of length `delta`
    /// starting at time `t` (only forces see `t`).
    void advance(ExtendedState& s, double delta, double t = 0.0);

    const CompositionScheme& scheme() const noexcept { return scheme_; }
    double omega() const noexcept { return omega_; }

private:
    void apply_a(ExtendedState& s, double h, double t);
    void apply_b(ExtendedState& s, double h, double t);
    void apply_c(ExtendedState& s, double h) const;

    const HamiltonianModel* model_;
    CompositionScheme scheme_;
    double omega_;
    const ForceModel* force_;
    std::vector<double> grad_pos_;
    std::vector<double> grad_mom_;
    std::vector<double> force_buf_;
};

ExtendedState step(const ExtendedState& s, const IntegratorConfig& cfg, const CompositionScheme& scheme,
                   const HamiltonianModel& model);

/// As `step`, with the A-stage update p += h * (-dH/dq(q, y) + F(q, y, t))
/// and the B-stage update y += h * (-dH/dx(x, p) + F(x, p, t)).
ExtendedState step_dissipative(const ExtendedState& s, const IntegratorConfig& cfg, const CompositionScheme& scheme,
                               const HamiltonianModel& model, const ForceModel& force, double t = 0.0);

using Observer = std::function<void(double t, const ExtendedState& s)>;

struct IntegrateOptions {
    /// Sample every `stride`-th step (the initial and final states are always sampled).
    std::size_t stride = 1;
    /// Abort with Outcome::escaped once max |component| exceeds this.
    double escape_bound = 1e12;
    /// Optional external force; nullptr for the conservative method.
    const ForceModel* force = nullptr;
    /// Called at every sample point, in time order.
    std::vector<Observer> observers;
    /// Keep samples in the returned trajectory.
    bool store = true;
};

/// Runs N = cfg.n_steps steps from the doubled embedding (Q0, P0, Q0, P0).
/// Failures do not throw: the trajectory is returned up to the last valid
/// sample with `outcome` and `message` set.
Trajectory integrate(std::span<const double> Q0, std::span<const double> P0, const IntegratorConfig& cfg,
                     const HamiltonianModel& model, const IntegrateOptions& options = {});

} // namespace tether

#endif
