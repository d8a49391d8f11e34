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

#ifndef TETHER_POINCARE_HPP
#define TETHER_POINCARE_HPP

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tether/integrator.hpp"
#include "tether/model.hpp"

namespace tether {

// Sections of the extended flow of a one-degree-of-freedom model through
// the surface x = 0 on a fixed Hbar shell. Trajectories start at (q, p, 0, y)
// with y solving Hbar(q, p, 0, y) = shell.

struct PoincareOptions {
    IntegratorConfig integrator;
    double shell = 10.0;
    /// Stop a trajectory once it has this many crossings...
    std::size_t min_crossings = 500;
    /// ...or once this much time has elapsed.
    double max_time = 1.0e4;
    /// Interpolated |x| at an accepted crossing.
    double crossing_tol = 1e-10;
    /// Crossings whose interpolated Hbar misses the shell by more than this
    /// are dropped.
    double shell_tol = 1e-3;
    /// Root search range and resolution for y.
    double y_bound = 50.0;
    std::size_t y_scan = 4000;
    std::size_t workers = 1;
};

struct SectionPoint {
    double q = 0.0;
    double p = 0.0;
    double y = 0.0;
    double t = 0.0;
    std::size_t trajectory = 0;
    /// Ordinal of the crossing within its trajectory, dropped ones included.
    std::size_t crossing = 0;
};

struct SkippedStart {
    double q = 0.0;
    double p = 0.0;
    std::string reason;
};

struct PoincareSection {
    double shell = 0.0;
    std::vector<SectionPoint> points;
    /// Recorded points of each trajectory, by trajectory index.
    std::vector<std::size_t> crossings;
    /// Grid points with no y on the shell, or whose run failed.
    std::vector<SkippedStart> skipped;
    std::size_t dropped_off_shell = 0;
    /// Crossings where the secant iteration did not reach crossing_tol.
    std::size_t dropped_unrefined = 0;

    std::size_t trajectories() const noexcept { return crossings.size(); }
    std::vector<SectionPoint> trajectory_points(std::size_t index) const;
};

/// Right-hand side of the extended canonical equations, (qdot, pdot, xdot, ydot).
std::array<double, 4> extended_vector_field(const HamiltonianModel& model, double binding, double q, double p,
                                            double x, double y);

/// All y in [-y_bound, y_bound] with Hbar(q, p, 0, y) = shell, ascending.
std::vector<double> shell_momenta(const HamiltonianModel& model, double binding, double q, double p, double shell,
                                  double y_bound = 50.0, std::size_t scan = 4000);

/// nq x np grid over [q_lo, q_hi] x [p_lo, p_hi], row-major in q.
std::vector<std::pair<double, double>> section_grid(double q_lo, double q_hi, std::size_t nq, double p_lo,
                                                    double p_hi, std::size_t np);

/// Section points of every trajectory started from the grid. Trajectory
/// indices follow grid order and then ascending y, whatever the worker count.
/// Throws std::invalid_argument unless the model has one degree of freedom.
PoincareSection poincare_section(const HamiltonianModel& model, const std::vector<std::pair<double, double>>& grid,
                                 const PoincareOptions& options);

struct ChaosOptions {
    /// Neighbours per local fit.
    std::size_t neighbours = 10;
    /// Trajectories with fewer points are ignored.
    std::size_t min_points = 30;
};

/// Mean over trajectories of the median local planarity lambda_2 / lambda_1
/// of the k-nearest-neighbour covariance in (q, p, y). Points of a regular
/// trajectory trace a curve and give values near zero; a trajectory that
/// fills an area gives values of order one. Throws AnalysisError when no
/// trajectory has enough points.
double chaos_statistic(const PoincareSection& section, const ChaosOptions& options = {});

/// Per-trajectory medians used by chaos_statistic (NaN when skipped).
std::vector<double> trajectory_planarity(const PoincareSection& section, const ChaosOptions& options = {});

} // namespace tether

#endif
