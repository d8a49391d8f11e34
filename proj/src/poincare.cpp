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

#include "tether/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "tether/analysis.hpp"
#include "tether/parallel.hpp"

namespace tether {

namespace {

struct Start {
    double q, p, y;
    std::size_t grid_index;
};

struct RunResult {
    std::vector<SectionPoint> points;
    std::size_t dropped = 0;
    std::size_t unrefined = 0;
    std::string failure;
};

double shell_residual(const HamiltonianModel& model, double binding, double q, double p, double y, double shell)
{
    const double a[1] = {q}, b[1] = {y}, x[1] = {0.0}, pp[1] = {p};
    return model.energy(a, b) + model.energy(x, pp) + 0.5 * binding * (q * q + (p - y) * (p - y)) - shell;
}

// Cubic Hermite interpolant of one coordinate on [0, h].
struct Hermite {
    double f0, f1, d0, d1, h;

    double operator()(double tau) const noexcept
    {
        const double s = tau / h;
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * f1 +
               (s3 - s2) * h * d1;
    }
};

RunResult run_trajectory(const HamiltonianModel& model, const Start& start, std::size_t index,
                         const PoincareOptions& opt)
{
    RunResult out;
    const auto& cfg = opt.integrator;
    const double binding = cfg.binding();
    const double delta = cfg.delta;
    Stepper stepper(model, build_scheme(cfg.order, cfg.gamma_variant), binding);

    auto record = [&](std::size_t crossing, double t, double q, double p, double y) {
        const double a[1] = {q}, b[1] = {y}, xz[1] = {0.0}, pp[1] = {p};
        const double hbar =
            model.energy(a, b) + model.energy(xz, pp) + 0.5 * binding * (q * q + (p - y) * (p - y));
        if (std::abs(hbar - opt.shell) > opt.shell_tol) {
            ++out.dropped;
            return;
        }
        out.points.push_back({q, p, y, t, index, crossing});
    };

    ExtendedState s({start.q}, {start.p}, {0.0}, {start.y});
    std::size_t crossings = 0;
    {
        const auto f = extended_vector_field(model, binding, start.q, start.p, 0.0, start.y);
        if (f[2] >= 0.0) {
            record(0, 0.0, start.q, start.p, start.y);
            ++crossings;
        }
    }

    ExtendedState prev = s;
    for (std::size_t k = 0; crossings < opt.min_crossings; ++k) {
        const double t0 = static_cast<double>(k) * delta;
        if (t0 >= opt.max_time) {
            break;
        }
        prev = s;
        try {
            stepper.advance(s, delta, t0);
        } catch (const EvaluationError& e) {
            out.failure = fmt::format("t = {}: {}", t0, e.what());
            break;
        }
        if (!s.is_finite() || s.max_abs() > 1e12) {
            out.failure = fmt::format("t = {}: trajectory left the finite range", t0);
            break;
        }
        if (!(prev.x[0] < 0.0 && s.x[0] >= 0.0)) {
            continue;
        }

        const auto f0 = extended_vector_field(model, binding, prev.q[0], prev.p[0], prev.x[0], prev.y[0]);
        const auto f1 = extended_vector_field(model, binding, s.q[0], s.p[0], s.x[0], s.y[0]);
        const Hermite hq{prev.q[0], s.q[0], f0[0], f1[0], delta};
        const Hermite hp{prev.p[0], s.p[0], f0[1], f1[1], delta};
        const Hermite hx{prev.x[0], s.x[0], f0[2], f1[2], delta};
        const Hermite hy{prev.y[0], s.y[0], f0[3], f1[3], delta};

        // Illinois-safeguarded secant on the interpolated x.
        double ta = 0.0, tb = delta, xa = hx(ta), xb = hx(tb);
        double tau = tb;
        bool refined = std::abs(xb) <= opt.crossing_tol;
        if (!refined) {
            int side = 0;
            for (int it = 0; it < 200 && !refined; ++it) {
                tau = tb - xb * (tb - ta) / (xb - xa);
                const double xm = hx(tau);
                if (std::abs(xm) <= opt.crossing_tol) {
                    refined = true;
                    break;
                }
                if ((xm < 0.0) == (xa < 0.0)) {
                    ta = tau;
                    xa = xm;
                    if (side == -1) {
                        xb *= 0.5;
                    }
                    side = -1;
                } else {
                    tb = tau;
                    xb = xm;
                    if (side == 1) {
                        xa *= 0.5;
                    }
                    side = 1;
                }
            }
        }
        ++crossings;
        if (!refined) {
            ++out.unrefined;
            continue;
        }
        record(crossings - 1, t0 + tau, hq(tau), hp(tau), hy(tau));
    }
    return out;
}

} // namespace

std::vector<SectionPoint> PoincareSection::trajectory_points(std::size_t index) const
{
    std::vector<SectionPoint> out;
    for (const auto& pt : points) {
        if (pt.trajectory == index) {
            out.push_back(pt);
        }
    }
    return out;
}

std::array<double, 4> extended_vector_field(const HamiltonianModel& model, double binding, double q, double p,
                                            double x, double y)
{
    const double qa[1] = {q}, ya[1] = {y}, xa[1] = {x}, pa[1] = {p};
    double ga_qy[1], gb_qy[1], ga_xp[1], gb_xp[1];
    model.grad_a(qa, ya, ga_qy);
    model.grad_b(qa, ya, gb_qy);
    model.grad_a(xa, pa, ga_xp);
    model.grad_b(xa, pa, gb_xp);
    return {gb_xp[0] + binding * (p - y), -ga_qy[0] - binding * (q - x), gb_qy[0] - binding * (p - y),
            -ga_xp[0] + binding * (q - x)};
}

std::vector<double> shell_momenta(const HamiltonianModel& model, double binding, double q, double p, double shell,
                                  double y_bound, std::size_t scan)
{
    if (model.dim() != 1) {
        throw std::invalid_argument("shell_momenta: model must have one degree of freedom");
    }
    if (scan < 2 || !(y_bound > 0.0)) {
        throw std::invalid_argument("shell_momenta: scan must be >= 2 and y_bound positive");
    }
    auto g = [&](double y) { return shell_residual(model, binding, q, p, y, shell); };
    std::vector<double> roots;
    const double h = 2.0 * y_bound / static_cast<double>(scan);
    double ylo = -y_bound, glo = g(ylo);
    if (glo == 0.0) {
        roots.push_back(ylo);
    }
    for (std::size_t i = 1; i <= scan; ++i) {
        const double yhi = -y_bound + h * static_cast<double>(i);
        const double ghi = g(yhi);
        if (ghi == 0.0) {
            roots.push_back(yhi);
        } else if ((glo < 0.0 && ghi > 0.0) || (glo > 0.0 && ghi < 0.0)) {
            double a = ylo, b = yhi, ga = glo;
            for (int it = 0; it < 200 && b - a > 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a));
                 ++it) {
                const double m = 0.5 * (a + b);
                const double gm = g(m);
                if (gm == 0.0) {
                    a = b = m;
                    break;
                }
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = m;
                    ga = gm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        ylo = yhi;
        glo = ghi;
    }
    return roots;
}

std::vector<std::pair<double, double>> section_grid(double q_lo, double q_hi, std::size_t nq, double p_lo,
                                                    double p_hi, std::size_t np)
{
    if (nq == 0 || np == 0) {
        throw std::invalid_argument("section_grid: grid must be nonempty");
    }
    auto node = [](double lo, double hi, std::size_t n, std::size_t i) {
        return n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    };
    std::vector<std::pair<double, double>> out;
    out.reserve(nq * np);
    for (std::size_t i = 0; i < nq; ++i) {
        for (std::size_t j = 0; j < np; ++j) {
            out.emplace_back(node(q_lo, q_hi, nq, i), node(p_lo, p_hi, np, j));
        }
    }
    return out;
}

PoincareSection poincare_section(const HamiltonianModel& model, const std::vector<std::pair<double, double>>& grid,
                                 const PoincareOptions& options)
{
    if (model.dim() != 1) {
        throw std::invalid_argument(
            fmt::format("poincare_section: needs a model with one degree of freedom, got {}", model.dim()));
    }
    options.integrator.validate();
    if (options.min_crossings == 0 || !(options.max_time > 0.0)) {
        throw std::invalid_argument("poincare_section: min_crossings and max_time must be positive");
    }
    const double binding = options.integrator.binding();

    PoincareSection section;
    section.shell = options.shell;
    std::vector<Start> starts;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto [q, p] = grid[g];
        const auto ys = shell_momenta(model, binding, q, p, options.shell, options.y_bound, options.y_scan);
        if (ys.empty()) {
            section.skipped.push_back({q, p, "no y on the shell"});
        }
        for (double y : ys) {
            starts.push_back({q, p, y, g});
        }
    }

    std::vector<RunResult> results(starts.size());
    parallel_for(starts.size(), options.workers,
                 [&](std::size_t i) { results[i] = run_trajectory(model, starts[i], i, options); });

    for (std::size_t i = 0; i < results.size(); ++i) {
        auto& r = results[i];
        section.crossings.push_back(r.points.size());
        section.dropped_off_shell += r.dropped;
        section.dropped_unrefined += r.unrefined;
        if (!r.failure.empty()) {
            section.skipped.push_back({starts[i].q, starts[i].p, "run failed at " + r.failure});
        }
        section.points.insert(section.points.end(), r.points.begin(), r.points.end());
    }
    return section;
}

std::vector<double> trajectory_planarity(const PoincareSection& section, const ChaosOptions& options)
{
    const std::size_t n_traj = section.trajectories();
    std::vector<std::vector<Eigen::Vector3d>> per(n_traj);
    for (const auto& pt : section.points) {
        per.at(pt.trajectory).emplace_back(pt.q, pt.p, pt.y);
    }
    const std::size_t k = std::max<std::size_t>(options.neighbours, 3);
    std::vector<double> out(n_traj, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t t = 0; t < n_traj; ++t) {
        const auto& pts = per[t];
        if (pts.size() < std::max(options.min_points, k + 1)) {
            continue;
        }
        Eigen::Vector3d lo = pts[0], hi = pts[0];
        for (const auto& v : pts) {
            lo = lo.cwiseMin(v);
            hi = hi.cwiseMax(v);
        }
        const double extent2 = (hi - lo).squaredNorm();

        std::vector<double> ratios;
        ratios.reserve(pts.size());
        std::vector<std::pair<double, std::size_t>> dist(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (std::size_t j = 0; j < pts.size(); ++j) {
                dist[j] = {(pts[j] - pts[i]).squaredNorm(), j};
            }
            std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
            Eigen::Vector3d mean = Eigen::Vector3d::Zero();
            for (std::size_t n = 0; n <= k; ++n) {
                mean += pts[dist[n].second];
            }
            mean /= static_cast<double>(k + 1);
            Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
            for (std::size_t n = 0; n <= k; ++n) {
                const Eigen::Vector3d d = pts[dist[n].second] - mean;
                cov += d * d.transpose();
            }
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov, Eigen::EigenvaluesOnly);
            const auto& ev = eig.eigenvalues();
            // Coincident neighbours (a periodic orbit) carry no area.
            ratios.push_back(ev[2] <= 1e-20 * extent2 ? 0.0 : std::max(ev[1], 0.0) / ev[2]);
        }
        auto mid = ratios.begin() + static_cast<std::ptrdiff_t>(ratios.size() / 2);
        std::nth_element(ratios.begin(), mid, ratios.end());
        out[t] = *mid;
    }
    return out;
}

double chaos_statistic(const PoincareSection& section, const ChaosOptions& options)
{
    const auto planarity = trajectory_planarity(section, options);
    double sum = 0.0;
    std::size_t used = 0;
    for (double v : planarity) {
        if (!std::isnan(v)) {
            sum += v;
            ++used;
        }
    }
    if (used == 0) {
        throw AnalysisError("chaos_statistic: no trajectory has enough section points");
    }
    return sum / static_cast<double>(used);
}

} // namespace tether
