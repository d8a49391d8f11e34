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

#include "tether/state.hpp"

#include <algorithm>
#include <cmath>

namespace tether {

ExtendedState::ExtendedState(std::vector<double> q_, std::vector<double> p_, std::vector<double> x_,
                             std::vector<double> y_)
    : q(std::move(q_)), p(std::move(p_)), x(std::move(x_)), y(std::move(y_))
{
    if (q.empty() || p.size() != q.size() || x.size() != q.size() || y.size() != q.size()) {
        throw std::invalid_argument("ExtendedState: q, p, x, y must share one nonzero length");
    }
}

ExtendedState ExtendedState::embed(std::span<const double> Q, std::span<const double> P)
{
    if (Q.size() != P.size()) {
        throw std::invalid_argument("ExtendedState::embed: Q and P lengths differ");
    }
    std::vector<double> q(Q.begin(), Q.end());
    std::vector<double> p(P.begin(), P.end());
    return ExtendedState(q, p, q, p);
}

bool ExtendedState::is_finite() const noexcept
{
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double z) { return std::isfinite(z); });
    };
    return finite(q) && finite(p) && finite(x) && finite(y);
}

double ExtendedState::max_abs() const noexcept
{
    double m = 0.0;
    for (const auto* v : {&q, &p, &x, &y}) {
        for (double z : *v) {
            m = std::max(m, std::abs(z));
        }
    }
    return m;
}

Projection parse_projection(const std::string& name)
{
    if (name == "copy1" || name == "qp") {
        return Projection::copy1;
    }
    if (name == "copy2" || name == "xy") {
        return Projection::copy2;
    }
    if (name == "mean") {
        return Projection::mean;
    }
    throw std::invalid_argument("unknown projection '" + name + "' (expected copy1, copy2 or mean)");
}

std::string to_string(Projection proj)
{
    switch (proj) {
    case Projection::copy1:
        return "copy1";
    case Projection::copy2:
        return "copy2";
    case Projection::mean:
        return "mean";
    }
    return "copy1";
}

namespace {

void project_into(std::span<const double> q, std::span<const double> p, std::span<const double> x,
                  std::span<const double> y, Projection proj, std::vector<double>& Q, std::vector<double>& P)
{
    const auto d = q.size();
    Q.resize(d);
    P.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
        switch (proj) {
        case Projection::copy1:
            Q[i] = q[i];
            P[i] = p[i];
            break;
        case Projection::copy2:
            Q[i] = x[i];
            P[i] = y[i];
            break;
        case Projection::mean:
            Q[i] = 0.5 * (q[i] + x[i]);
            P[i] = 0.5 * (p[i] + y[i]);
            break;
        }
    }
}

} // namespace

PhasePoint project(const ExtendedState& s, Projection proj)
{
    PhasePoint out;
    project_into(s.q, s.p, s.x, s.y, proj, out.q, out.p);
    return out;
}

ExtendedState ExtendedStateView::to_state() const
{
    auto vec = [](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); };
    return ExtendedState(vec(q()), vec(p()), vec(x()), vec(y()));
}

std::string to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::completed:
        return "completed";
    case Outcome::escaped:
        return "escaped";
    case Outcome::step_failed:
        return "step_failed";
    }
    return "completed";
}

void Trajectory::push_back(double t, const ExtendedState& s)
{
    if (s.dim() != dim_) {
        throw std::invalid_argument("Trajectory::push_back: dimension mismatch");
    }
    times_.push_back(t);
    for (const auto* v : {&s.q, &s.p, &s.x, &s.y}) {
        data_.insert(data_.end(), v->begin(), v->end());
    }
}

ExtendedStateView Trajectory::at(std::size_t i) const
{
    if (i >= size()) {
        throw std::out_of_range("Trajectory::at: index out of range");
    }
    return ExtendedStateView(std::span<const double>(data_).subspan(4 * dim_ * i, 4 * dim_), dim_);
}

void PhaseTrajectory::push_back(double t, std::span<const double> q, std::span<const double> p)
{
    if (q.size() != dim_ || p.size() != dim_) {
        throw std::invalid_argument("PhaseTrajectory::push_back: dimension mismatch");
    }
    times_.push_back(t);
    data_.insert(data_.end(), q.begin(), q.end());
    data_.insert(data_.end(), p.begin(), p.end());
}

PhaseView PhaseTrajectory::at(std::size_t i) const
{
    if (i >= size()) {
        throw std::out_of_range("PhaseTrajectory::at: index out of range");
    }
    return PhaseView(std::span<const double>(data_).subspan(2 * dim_ * i, 2 * dim_), dim_);
}

std::vector<double> PhaseTrajectory::component(std::size_t k) const
{
    if (k >= 2 * dim_) {
        throw std::out_of_range("PhaseTrajectory::component: index out of range");
    }
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
        out[i] = data_[2 * dim_ * i + k];
    }
    return out;
}

PhaseTrajectory project(const Trajectory& traj, Projection proj)
{
    PhaseTrajectory out(traj.dim());
    std::vector<double> Q, P;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto s = traj.at(i);
        project_into(s.q(), s.p(), s.x(), s.y(), proj, Q, P);
        out.push_back(traj.time(i), Q, P);
    }
    return out;
}

} // namespace tether
