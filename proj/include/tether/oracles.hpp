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

#ifndef TETHER_ORACLES_HPP
#define TETHER_ORACLES_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tether/integrator.hpp"
#include "tether/model.hpp"
#include "tether/state.hpp"

namespace tether {

// Closed-form solution of H = (Q^2 + 1)(P^2 + 1) / 2 started at (Q0, 0):
//
//     Q(t) = Q0 cn(t sqrt(1 + Q0^2) | m),   m = Q0^2 / (1 + Q0^2),
//
// on the first half period, and the point reflection through the origin on
// the second. The half period is pi 2F1(1/2, 1/2; 1; -Q0^2) = 2 K(-Q0^2).

struct EllipticParams {
    double q0;
    /// Q0^2 / (1 + Q0^2)
    double m;
    double half_period;
};

/// Throws std::invalid_argument for Q0 == 0 (the fixed point has no phase).
EllipticParams elliptic_params(double Q0);

double half_period(double Q0);

/// Same quantity from a direct quadrature of the period integral.
double half_period_quadrature(double Q0);

/// (Q(t), P(t)) of the product system from (Q0, 0).
std::pair<double, double> exact_solution(double Q0, double t);

/// exact_solution with the elliptic parameters computed once.
class ProductExactSolution {
public:
    explicit ProductExactSolution(double Q0);

    std::pair<double, double> operator()(double t) const;
    const EllipticParams& params() const noexcept { return params_; }

    /// Exact samples at the given times.
    PhaseTrajectory sample(std::span<const double> times) const;

private:
    EllipticParams params_;
    double rate_;
};

// Reference integration where no closed form exists: fixed-step classical
// RK4 with compensated summation, refined by step doubling until the
// endpoint is certified.

class ReferenceDidNotConverge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ReferenceOptions {
    /// Accept once halving the step changes the endpoint by at most
    /// rel_tol * max(1, |endpoint|_inf).
    double rel_tol = 1e-11;
    /// Upper bound on the first trial step.
    double initial_step = 1e-2;
    int max_refinements = 12;
    /// Number of output intervals; samples are at t_k = T k / samples.
    std::size_t samples = 1;
};

struct ReferenceCertificate {
    double step = 0.0;
    std::size_t substeps_per_sample = 0;
    int refinements = 0;
    /// Endpoint change between the accepted step and twice that step.
    double endpoint_change = 0.0;
    bool converged = false;
};

struct ReferenceResult {
    PhaseTrajectory trajectory;
    ReferenceCertificate certificate;
};

/// Throws ReferenceDidNotConverge when the certificate cannot be met.
ReferenceResult reference_flow(const HamiltonianModel& model, std::span<const double> Q0, std::span<const double> P0,
                               double T, const ReferenceOptions& options = {});

/// As reference_flow for dQ/dt = dH/dP, dP/dt = -dH/dQ + F(Q, P, t).
ReferenceResult reference_dissipative(const HamiltonianModel& model, const ForceModel& force,
                                      std::span<const double> Q0, std::span<const double> P0, double T,
                                      const ReferenceOptions& options = {});

/// One classical RK4 step of the canonical equations of H (plus an optional
/// force on the momentum equation). Throws EvaluationError on non-finite
/// derivatives.
std::pair<std::vector<double>, std::vector<double>> rk4_step(const HamiltonianModel& model,
                                                             std::span<const double> Q, std::span<const double> P,
                                                             double delta, const ForceModel* force = nullptr,
                                                             double t = 0.0);

/// n_steps RK4 steps of size delta sampled every `stride` steps (and at the
/// end). This is the plain non-symplectic comparator, without compensation.
PhaseTrajectory rk4_integrate(const HamiltonianModel& model, std::span<const double> Q0, std::span<const double> P0,
                              double delta, std::size_t n_steps, std::size_t stride = 1,
                              const ForceModel* force = nullptr);

} // namespace tether

#endif
