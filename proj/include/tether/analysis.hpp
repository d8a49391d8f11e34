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

#ifndef TETHER_ANALYSIS_HPP
#define TETHER_ANALYSIS_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tether/model.hpp"
#include "tether/state.hpp"

namespace tether {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Polar errors of a one-degree-of-freedom trajectory

struct PolarErrorSeries {
    std::vector<double> times;
    /// |r_numeric - r_exact|, r = sqrt(Q^2 + P^2)
    std::vector<double> amplitude_error;
    /// |theta_numeric - theta_exact| with both angles unwrapped along the series
    std::vector<double> phase_error;

    double max_amplitude() const noexcept;
    double max_phase() const noexcept;
};

/// Streaming form of polar_errors, for runs too long to store.
class PolarErrorAccumulator {
public:
    explicit PolarErrorAccumulator(bool keep_series = true) : keep_series_(keep_series) {}

    /// Throws AnalysisError when either radius is below 1e-12 or the angle
    /// jumps by pi or more between consecutive samples.
    void add(double t, double q_num, double p_num, double q_exact, double p_exact);

    double max_amplitude() const noexcept { return max_amplitude_; }
    double max_phase() const noexcept { return max_phase_; }
    std::size_t count() const noexcept { return count_; }
    const PolarErrorSeries& series() const noexcept { return series_; }

private:
    bool keep_series_;
    std::size_t count_ = 0;
    double raw_num_ = 0.0, raw_exact_ = 0.0;
    double unwrapped_num_ = 0.0, unwrapped_exact_ = 0.0;
    double max_amplitude_ = 0.0, max_phase_ = 0.0;
    PolarErrorSeries series_;
};

/// Both trajectories must be one-dimensional and share a time grid.
PolarErrorSeries polar_errors(const PhaseTrajectory& numeric, const PhaseTrajectory& exact);

// Running maxima of scaled errors

/// max_{s <= t} |numeric(s) - benchmark(s)| / scale, sample by sample.
/// Throws std::invalid_argument for a zero or non-finite scale.
std::vector<double> scaled_running_max(std::span<const double> numeric, std::span<const double> benchmark,
                                       double scale);

struct ScaledErrorCurves {
    std::vector<double> times;
    std::vector<std::string> labels;
    /// One nondecreasing series per label.
    std::vector<std::vector<double>> curves;
};

/// Error curves for (t, r, phi, H) of a Schwarzschild run: t is scaled by
/// the Keplerian period 2 pi sqrt(a0^3 / M), r by the apoapsis a0 (1 + e0),
/// phi by 2 pi and H is unscaled.
ScaledErrorCurves schwarzschild_error_curves(const PhaseTrajectory& numeric, const PhaseTrajectory& benchmark,
                                             const HamiltonianModel& model, double a0, double e0, double M);

// Conservation diagnostics

struct EnergyDrift {
    std::vector<double> times;
    /// H(Q, P) - H(Q0, P0) on the projected solution
    std::vector<double> original;
    /// Hbar(t) - Hbar(0); empty for trajectories without an extended state
    std::vector<double> extended;

    double max_abs_original() const noexcept;
    double max_abs_extended() const noexcept;
};

EnergyDrift energy_drift(const Trajectory& traj, const HamiltonianModel& model, double binding,
                         Projection proj = Projection::copy1);
EnergyDrift energy_drift(const PhaseTrajectory& traj, const HamiltonianModel& model);

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// OLS standard error of the slope.
    double slope_stderr = 0.0;
    /// Standard error inflated for AR(1) residual correlation
    /// (n_eff = n (1 - rho) / (1 + rho)).
    double slope_stderr_ar1 = 0.0;
    double lag1_autocorrelation = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Slope of log(y) against log(x). Throws for non-positive data or < 2 points.
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Time averages of NLS mode masses

struct ErgodicAverages {
    /// Sample times, excluding t = 0 where the average is undefined.
    std::vector<double> times;
    /// averages[i][k] = (1/t_k) * integral_0^{t_k} I_i dt (trapezoidal).
    std::vector<std::vector<double>> averages;
    /// <I_1> - <I_2>
    std::vector<double> gap;
};

/// Throws AnalysisError when the trajectory does not extend past t = 0.
ErgodicAverages ergodic_averages(const PhaseTrajectory& traj);

/// Streaming trapezoidal running averages of per-mode masses.
class ErgodicAccumulator {
public:
    explicit ErgodicAccumulator(std::size_t modes) : integrals_(modes, 0.0), last_(modes, 0.0) {}

    void add(double t, std::span<const double> masses);

    double time() const noexcept { return t_; }
    /// Throws AnalysisError at t = 0.
    std::vector<double> averages() const;

private:
    std::vector<double> integrals_;
    std::vector<double> last_;
    double t_ = 0.0;
    bool started_ = false;
};

} // namespace tether

#endif
