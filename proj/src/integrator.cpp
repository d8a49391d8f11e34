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

#include "tether/integrator.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace tether {

char to_char(StageKind kind) noexcept
{
    switch (kind) {
    case StageKind::A:
        return 'A';
    case StageKind::B:
        return 'B';
    case StageKind::C:
        return 'C';
    }
    return '?';
}

double CompositionScheme::total_fraction(StageKind kind) const noexcept
{
    double sum = 0.0;
    for (const auto& st : stages) {
        if (st.kind == kind) {
            sum += st.fraction;
        }
    }
    return sum;
}

bool CompositionScheme::is_palindromic() const noexcept
{
    const auto n = stages.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        if (stages[i] != stages[n - 1 - i]) {
            return false;
        }
    }
    return true;
}

CompositionScheme CompositionScheme::reversed() const
{
    return CompositionScheme{std::vector<Stage>(stages.rbegin(), stages.rend()), order};
}

std::size_t CompositionScheme::gradient_stages() const noexcept
{
    std::size_t n = 0;
    for (const auto& st : stages) {
        n += st.kind != StageKind::C ? 1 : 0;
    }
    return n;
}

GammaVariant parse_gamma_variant(const std::string& name)
{
    if (name == "standard") {
        return GammaVariant::standard;
    }
    if (name == "printed") {
        return GammaVariant::printed;
    }
    throw std::invalid_argument("unknown gamma variant '" + name + "' (expected standard or printed)");
}

std::string to_string(GammaVariant variant)
{
    return variant == GammaVariant::printed ? "printed" : "standard";
}

double triple_jump_gamma(int order, GammaVariant variant)
{
    if (order < 4 || order % 2 != 0) {
        throw std::invalid_argument(fmt::format("triple_jump_gamma: order must be even and >= 4, got {}", order));
    }
    const double exponent_den = variant == GammaVariant::standard ? order - 1 : order + 1;
    return 1.0 / (2.0 - std::pow(2.0, 1.0 / exponent_den));
}

namespace {

void append_merged(std::vector<Stage>& out, const Stage& st)
{
    if (!out.empty() && out.back().kind == st.kind) {
        out.back().fraction += st.fraction;
    } else {
        out.push_back(st);
    }
}

} // namespace

CompositionScheme build_scheme(int order, GammaVariant variant)
{
    if (order < 2 || order % 2 != 0) {
        throw std::invalid_argument(fmt::format("build_scheme: order must be even and >= 2, got {}", order));
    }
    CompositionScheme scheme{{{StageKind::A, 0.5},
                              {StageKind::B, 0.5},
                              {StageKind::C, 1.0},
                              {StageKind::B, 0.5},
                              {StageKind::A, 0.5}},
                             2};
    for (int l = 4; l <= order; l += 2) {
        const double gamma = triple_jump_gamma(l, variant);
        const double weights[3] = {gamma, 1.0 - 2.0 * gamma, gamma};
        std::vector<Stage> next;
        next.reserve(3 * scheme.stages.size());
        for (double w : weights) {
            for (const auto& st : scheme.stages) {
                append_merged(next, Stage{st.kind, w * st.fraction});
            }
        }
        scheme.stages = std::move(next);
        scheme.order = l;
    }
    return scheme;
}

RestraintRate parse_restraint_rate(const std::string& name)
{
    if (name == "twice_omega") {
        return RestraintRate::twice_omega;
    }
    if (name == "omega") {
        return RestraintRate::omega;
    }
    throw std::invalid_argument("unknown restraint rate '" + name + "' (expected twice_omega or omega)");
}

std::string to_string(RestraintRate rate)
{
    return rate == RestraintRate::omega ? "omega" : "twice_omega";
}

void IntegratorConfig::validate() const
{
    if (!(std::isfinite(delta) && delta > 0.0)) {
        throw std::invalid_argument(fmt::format("delta must be finite and > 0, got {}", delta));
    }
    if (!(std::isfinite(omega) && omega >= 0.0)) {
        throw std::invalid_argument(fmt::format("omega must be finite and >= 0, got {}", omega));
    }
    if (order < 2 || order % 2 != 0) {
        throw std::invalid_argument(fmt::format("order must be even and >= 2, got {}", order));
    }
}

ForceModel ForceModel::linear_damping(double gamma)
{
    return ForceModel{[gamma](std::span<const double>, std::span<const double> momentum, double, std::span<double> out) {
        for (std::size_t i = 0; i < momentum.size(); ++i) {
            out[i] = -gamma * momentum[i];
        }
    }};
}

namespace {

// Exact flow of omega * H_C: sums (q + x, p + y) are fixed and the
// differences (q - x, p - y) rotate by `angle` = 2 * omega * h.
void rotate_differences(ExtendedState& s, double angle)
{
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        const double sum_pos = s.q[i] + s.x[i];
        const double sum_mom = s.p[i] + s.y[i];
        const double dif_pos = s.q[i] - s.x[i];
        const double dif_mom = s.p[i] - s.y[i];
        const double rot_pos = c * dif_pos + sn * dif_mom;
        const double rot_mom = -sn * dif_pos + c * dif_mom;
        s.q[i] = 0.5 * (sum_pos + rot_pos);
        s.x[i] = 0.5 * (sum_pos - rot_pos);
        s.p[i] = 0.5 * (sum_mom + rot_mom);
        s.y[i] = 0.5 * (sum_mom - rot_mom);
    }
}

void require_dim(const ExtendedState& s, const HamiltonianModel& model, const char* who)
{
    if (s.dim() != model.dim()) {
        throw std::invalid_argument(
            fmt::format("{}: state dimension {} does not match model dimension {}", who, s.dim(), model.dim()));
    }
}

void require_finite(std::span<const double> v, const char* flow, const char* what)
{
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw EvaluationError(fmt::format("{}: non-finite {}[{}]", flow, what, i));
        }
    }
}

} // namespace

ExtendedState flow_a(const ExtendedState& s, double delta, const HamiltonianModel& model)
{
    require_dim(s, model, "flow_a");
    ExtendedState out = s;
    Stepper stepper(model, CompositionScheme{{{StageKind::A, 1.0}}, 2}, 0.0);
    stepper.advance(out, delta);
    return out;
}

ExtendedState flow_b(const ExtendedState& s, double delta, const HamiltonianModel& model)
{
    require_dim(s, model, "flow_b");
    ExtendedState out = s;
    Stepper stepper(model, CompositionScheme{{{StageKind::B, 1.0}}, 2}, 0.0);
    stepper.advance(out, delta);
    return out;
}

ExtendedState flow_c(const ExtendedState& s, double delta, double omega)
{
    ExtendedState out = s;
    rotate_differences(out, 2.0 * omega * delta);
    return out;
}

namespace {

double restraint(std::span<const double> q, std::span<const double> p, std::span<const double> x,
                 std::span<const double> y)
{
    double sum = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double a = q[i] - x[i];
        const double b = p[i] - y[i];
        sum += a * a + b * b;
    }
    return 0.5 * sum;
}

} // namespace

double extended_energy(const ExtendedState& s, const HamiltonianModel& model, double omega)
{
    return model.energy(s.q, s.y) + model.energy(s.x, s.p) + omega * restraint(s.q, s.p, s.x, s.y);
}

double extended_energy(const ExtendedStateView& s, const HamiltonianModel& model, double omega)
{
    return model.energy(s.q(), s.y()) + model.energy(s.x(), s.p()) + omega * restraint(s.q(), s.p(), s.x(), s.y());
}

Stepper::Stepper(const HamiltonianModel& model, CompositionScheme scheme, double omega, const ForceModel* force)
    : model_(&model), scheme_(std::move(scheme)), omega_(omega), force_(force), grad_pos_(model.dim()),
      grad_mom_(model.dim()), force_buf_(model.dim())
{
    if (force_ != nullptr && !force_->external_force) {
        force_ = nullptr;
    }
}

void Stepper::apply_a(ExtendedState& s, double h, double t)
{
    model_->grad_a(s.q, s.y, grad_pos_);
    model_->grad_b(s.q, s.y, grad_mom_);
    require_finite(grad_pos_, "flow_a", "dH/dq(q, y)");
    require_finite(grad_mom_, "flow_a", "dH/dy(q, y)");
    const auto d = s.dim();
    if (force_ != nullptr) {
        force_->external_force(s.q, s.y, t, force_buf_);
        require_finite(force_buf_, "flow_a", "F(q, y)");
        for (std::size_t i = 0; i < d; ++i) {
            s.p[i] += h * (-grad_pos_[i] + force_buf_[i]);
        }
    } else {
        for (std::size_t i = 0; i < d; ++i) {
            s.p[i] -= h * grad_pos_[i];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        s.x[i] += h * grad_mom_[i];
    }
}

void Stepper::apply_b(ExtendedState& s, double h, double t)
{
    model_->grad_a(s.x, s.p, grad_pos_);
    model_->grad_b(s.x, s.p, grad_mom_);
    require_finite(grad_pos_, "flow_b", "dH/dx(x, p)");
    require_finite(grad_mom_, "flow_b", "dH/dp(x, p)");
    const auto d = s.dim();
    for (std::size_t i = 0; i < d; ++i) {
        s.q[i] += h * grad_mom_[i];
    }
    if (force_ != nullptr) {
        force_->external_force(s.x, s.p, t, force_buf_);
        require_finite(force_buf_, "flow_b", "F(x, p)");
        for (std::size_t i = 0; i < d; ++i) {
            s.y[i] += h * (-grad_pos_[i] + force_buf_[i]);
        }
    } else {
        for (std::size_t i = 0; i < d; ++i) {
            s.y[i] -= h * grad_pos_[i];
        }
    }
}

void Stepper::apply_c(ExtendedState& s, double h) const
{
    if (omega_ == 0.0 || h == 0.0) {
        return;
    }
    rotate_differences(s, 2.0 * omega_ * h);
}

void Stepper::advance(ExtendedState& s, double delta, double t)
{
    if (s.dim() != model_->dim()) {
        throw std::invalid_argument(fmt::format("Stepper::advance: state dimension {} does not match model dimension {}",
                                                s.dim(), model_->dim()));
    }
    // Each kind of stage carries its own clock; all three reach t + delta.
    double elapsed_a = 0.0;
    double elapsed_b = 0.0;
    for (std::size_t i = 0; i < scheme_.stages.size(); ++i) {
        const auto& st = scheme_.stages[i];
        const double h = st.fraction * delta;
        try {
            switch (st.kind) {
            case StageKind::A:
                apply_a(s, h, t + elapsed_a * delta);
                elapsed_a += st.fraction;
                break;
            case StageKind::B:
                apply_b(s, h, t + elapsed_b * delta);
                elapsed_b += st.fraction;
                break;
            case StageKind::C:
                apply_c(s, h);
                break;
            }
        } catch (const DomainError& e) {
            throw DomainError(fmt::format("stage {} ({}): {}", i, to_char(st.kind), e.what()), i);
        } catch (const EvaluationError& e) {
            throw EvaluationError(fmt::format("stage {} ({}): {}", i, to_char(st.kind), e.what()), i);
        }
    }
}

ExtendedState step(const ExtendedState& s, const IntegratorConfig& cfg, const CompositionScheme& scheme,
                   const HamiltonianModel& model)
{
    require_dim(s, model, "step");
    ExtendedState out = s;
    Stepper stepper(model, scheme, cfg.binding());
    stepper.advance(out, cfg.delta);
    return out;
}

ExtendedState step_dissipative(const ExtendedState& s, const IntegratorConfig& cfg, const CompositionScheme& scheme,
                               const HamiltonianModel& model, const ForceModel& force, double t)
{
    require_dim(s, model, "step_dissipative");
    ExtendedState out = s;
    Stepper stepper(model, scheme, cfg.binding(), &force);
    stepper.advance(out, cfg.delta, t);
    return out;
}

Trajectory integrate(std::span<const double> Q0, std::span<const double> P0, const IntegratorConfig& cfg,
                     const HamiltonianModel& model, const IntegrateOptions& options)
{
    cfg.validate();
    if (Q0.size() != model.dim() || P0.size() != model.dim()) {
        throw std::invalid_argument(fmt::format("integrate: initial condition has dimensions ({}, {}), model has {}",
                                                Q0.size(), P0.size(), model.dim()));
    }
    if (options.stride == 0) {
        throw std::invalid_argument("integrate: stride must be >= 1");
    }

    Stepper stepper(model, build_scheme(cfg.order, cfg.gamma_variant), cfg.binding(), options.force);
    ExtendedState s = ExtendedState::embed(Q0, P0);
    ExtendedState prev = s;
    Trajectory traj(model.dim());

    std::size_t last_emitted = 0;
    auto emit = [&](std::size_t k, const ExtendedState& state) {
        const double t = static_cast<double>(k) * cfg.delta;
        if (options.store) {
            traj.push_back(t, state);
        }
        for (const auto& obs : options.observers) {
            obs(t, state);
        }
        last_emitted = k;
    };

    emit(0, s);
    for (std::size_t k = 1; k <= cfg.n_steps; ++k) {
        prev = s;
        const double t_start = static_cast<double>(k - 1) * cfg.delta;
        std::string failure;
        Outcome outcome = Outcome::completed;
        try {
            stepper.advance(s, cfg.delta, t_start);
            if (!s.is_finite()) {
                outcome = Outcome::step_failed;
                failure = "non-finite state";
            } else if (s.max_abs() > options.escape_bound) {
                outcome = Outcome::escaped;
                failure = fmt::format("trajectory escaped (|state| > {})", options.escape_bound);
            }
        } catch (const EvaluationError& e) {
            outcome = Outcome::step_failed;
            failure = e.what();
        }
        if (outcome != Outcome::completed) {
            if (last_emitted != k - 1) {
                emit(k - 1, prev);
            }
            traj.outcome = outcome;
            traj.last_valid_step = k - 1;
            traj.message = fmt::format("step {}: {}", k, failure);
            return traj;
        }
        if (k % options.stride == 0 || k == cfg.n_steps) {
            emit(k, s);
        }
    }
    traj.last_valid_step = cfg.n_steps;
    return traj;
}

} // namespace tether
