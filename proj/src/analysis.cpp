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

#include "tether/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "tether/integrator.hpp"
#include "tether/models.hpp"

namespace tether {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double max_abs(const std::vector<double>& v) noexcept
{
    double m = 0.0;
    for (double z : v) {
        m = std::max(m, std::abs(z));
    }
    return m;
}

} // namespace

double PolarErrorSeries::max_amplitude() const noexcept
{
    return max_abs(amplitude_error);
}

double PolarErrorSeries::max_phase() const noexcept
{
    return max_abs(phase_error);
}

void PolarErrorAccumulator::add(double t, double q_num, double p_num, double q_exact, double p_exact)
{
    const double r_num = std::hypot(q_num, p_num);
    const double r_exact = std::hypot(q_exact, p_exact);
    if (r_num < 1e-12 || r_exact < 1e-12) {
        throw AnalysisError(fmt::format("phase undefined near origin at t = {}", t));
    }
    const double th_num = std::atan2(p_num, q_num);
    const double th_exact = std::atan2(p_exact, q_exact);
    if (count_ == 0) {
        unwrapped_num_ = th_num;
        unwrapped_exact_ = th_exact;
    } else {
        auto unwrap = [t](double raw, double prev_raw, double& acc) {
            double step = raw - prev_raw;
            step -= two_pi * std::round(step / two_pi);
            if (std::abs(step) >= std::numbers::pi) {
                throw AnalysisError(fmt::format("sampling too coarse to unwrap phase at t = {}", t));
            }
            acc += step;
        };
        unwrap(th_num, raw_num_, unwrapped_num_);
        unwrap(th_exact, raw_exact_, unwrapped_exact_);
    }
    raw_num_ = th_num;
    raw_exact_ = th_exact;
    ++count_;

    const double amp = std::abs(r_num - r_exact);
    const double phase = std::abs(unwrapped_num_ - unwrapped_exact_);
    max_amplitude_ = std::max(max_amplitude_, amp);
    max_phase_ = std::max(max_phase_, phase);
    if (keep_series_) {
        series_.times.push_back(t);
        series_.amplitude_error.push_back(amp);
        series_.phase_error.push_back(phase);
    }
}

PolarErrorSeries polar_errors(const PhaseTrajectory& numeric, const PhaseTrajectory& exact)
{
    if (numeric.dim() != 1 || exact.dim() != 1) {
        throw std::invalid_argument("polar_errors: trajectories must have one degree of freedom");
    }
    if (numeric.size() != exact.size()) {
        throw std::invalid_argument("polar_errors: trajectories have different lengths");
    }
    PolarErrorAccumulator acc;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        const double t = numeric.time(i);
        if (std::abs(t - exact.time(i)) > 1e-9 * std::max(1.0, std::abs(t))) {
            throw std::invalid_argument(fmt::format("polar_errors: time grids differ at sample {}", i));
        }
        const auto a = numeric.at(i);
        const auto b = exact.at(i);
        acc.add(t, a.q()[0], a.p()[0], b.q()[0], b.p()[0]);
    }
    return acc.series();
}

std::vector<double> scaled_running_max(std::span<const double> numeric, std::span<const double> benchmark,
                                       double scale)
{
    if (!(std::isfinite(scale) && scale != 0.0)) {
        throw std::invalid_argument(fmt::format("scaled_running_max: scale must be finite and nonzero, got {}", scale));
    }
    if (numeric.size() != benchmark.size()) {
        throw std::invalid_argument("scaled_running_max: series lengths differ");
    }
    std::vector<double> out(numeric.size());
    double running = 0.0;
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        running = std::max(running, std::abs(numeric[i] - benchmark[i]) / std::abs(scale));
        out[i] = running;
    }
    return out;
}

ScaledErrorCurves schwarzschild_error_curves(const PhaseTrajectory& numeric, const PhaseTrajectory& benchmark,
                                             const HamiltonianModel& model, double a0, double e0, double M)
{
    if (numeric.dim() != 3 || benchmark.dim() != 3) {
        throw std::invalid_argument("schwarzschild_error_curves: expected three degrees of freedom");
    }
    if (numeric.size() != benchmark.size()) {
        throw std::invalid_argument("schwarzschild_error_curves: trajectories have different lengths");
    }
    const double kepler_period = two_pi * std::sqrt(a0 * a0 * a0 / M);
    ScaledErrorCurves out;
    out.times = numeric.times();
    out.labels = {"t", "r", "phi", "H"};
    out.curves.push_back(scaled_running_max(numeric.component(0), benchmark.component(0), kepler_period));
    out.curves.push_back(scaled_running_max(numeric.component(1), benchmark.component(1), a0 * (1.0 + e0)));
    out.curves.push_back(scaled_running_max(numeric.component(2), benchmark.component(2), two_pi));
    std::vector<double> h_num(numeric.size()), h_ref(benchmark.size());
    for (std::size_t i = 0; i < numeric.size(); ++i) {
        h_num[i] = model.energy(numeric.at(i).q(), numeric.at(i).p());
        h_ref[i] = model.energy(benchmark.at(i).q(), benchmark.at(i).p());
    }
    out.curves.push_back(scaled_running_max(h_num, h_ref, 1.0));
    return out;
}

double EnergyDrift::max_abs_original() const noexcept
{
    return max_abs(original);
}

double EnergyDrift::max_abs_extended() const noexcept
{
    return max_abs(extended);
}

EnergyDrift energy_drift(const Trajectory& traj, const HamiltonianModel& model, double binding, Projection proj)
{
    EnergyDrift out;
    if (traj.empty()) {
        return out;
    }
    const auto phase = project(traj, proj);
    const double h0 = model.energy(phase.at(0).q(), phase.at(0).p());
    const auto s0 = traj.at(0);
    const double hbar0 = extended_energy(s0, model, binding);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.times.push_back(traj.time(i));
        out.original.push_back(model.energy(phase.at(i).q(), phase.at(i).p()) - h0);
        out.extended.push_back(extended_energy(traj.at(i), model, binding) - hbar0);
    }
    return out;
}

EnergyDrift energy_drift(const PhaseTrajectory& traj, const HamiltonianModel& model)
{
    EnergyDrift out;
    if (traj.empty()) {
        return out;
    }
    const double h0 = model.energy(traj.at(0).q(), traj.at(0).p());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.times.push_back(traj.time(i));
        out.original.push_back(model.energy(traj.at(i).q(), traj.at(i).p()) - h0);
    }
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    const auto n = x.size();
    if (n != y.size() || n < 2) {
        throw std::invalid_argument("fit_line: need two equally long series with at least 2 points");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_line: abscissae are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (n < 3) {
        return fit;
    }

    std::vector<double> res(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        res[i] = y[i] - fit.intercept - fit.slope * x[i];
        ss += res[i] * res[i];
    }
    fit.slope_stderr = std::sqrt(ss / static_cast<double>(n - 2) / sxx);

    double lag = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        lag += res[i] * res[i - 1];
    }
    const double rho = ss > 0.0 ? std::clamp(lag / ss, -0.999999, 0.999999) : 0.0;
    fit.lag1_autocorrelation = rho;
    const double inflation = rho > 0.0 ? std::sqrt((1.0 + rho) / (1.0 - rho)) : 1.0;
    fit.slope_stderr_ar1 = fit.slope_stderr * inflation;
    return fit;
}

double loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("loglog_slope: need two equally long series with at least 2 points");
    }
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) {
            throw std::invalid_argument("loglog_slope: data must be positive");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    return fit_line(lx, ly).slope;
}

void ErgodicAccumulator::add(double t, std::span<const double> masses)
{
    if (masses.size() != integrals_.size()) {
        throw std::invalid_argument("ErgodicAccumulator::add: mode count mismatch");
    }
    if (started_) {
        const double h = t - t_;
        for (std::size_t i = 0; i < masses.size(); ++i) {
            integrals_[i] += 0.5 * h * (last_[i] + masses[i]);
        }
    }
    std::copy(masses.begin(), masses.end(), last_.begin());
    t_ = t;
    started_ = true;
}

std::vector<double> ErgodicAccumulator::averages() const
{
    if (!(t_ > 0.0)) {
        throw AnalysisError("time average undefined at T = 0");
    }
    std::vector<double> out(integrals_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = integrals_[i] / t_;
    }
    return out;
}

ErgodicAverages ergodic_averages(const PhaseTrajectory& traj)
{
    if (traj.size() < 2 || !(traj.times().back() > 0.0)) {
        throw AnalysisError("time average undefined at T = 0");
    }
    const auto modes = traj.dim();
    ErgodicAccumulator acc(modes);
    ErgodicAverages out;
    out.averages.assign(modes, {});
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto pt = traj.at(k);
        const auto masses = nls_masses(pt.q(), pt.p());
        acc.add(traj.time(k), masses.masses);
        if (k == 0) {
            continue;
        }
        const auto avg = acc.averages();
        out.times.push_back(traj.time(k));
        for (std::size_t i = 0; i < modes; ++i) {
            out.averages[i].push_back(avg[i]);
        }
        out.gap.push_back(modes >= 2 ? avg[0] - avg[1] : 0.0);
    }
    return out;
}

} // namespace tether
