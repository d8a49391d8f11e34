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

#ifndef TETHER_STATE_HPP
#define TETHER_STATE_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tether {

/// A point (q, p, x, y) of the doubled phase space. The pairs (q, y) and
/// (x, p) are the arguments of the two mixed copies of the Hamiltonian.
struct ExtendedState {
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> x;
    std::vector<double> y;

    ExtendedState() = default;
    ExtendedState(std::vector<double> q_, std::vector<double> p_, std::vector<double> x_, std::vector<double> y_);

    /// Doubled embedding (Q, P, Q, P) of an original phase point.
    static ExtendedState embed(std::span<const double> Q, std::span<const double> P);

    std::size_t dim() const noexcept { return q.size(); }
    bool is_finite() const noexcept;
    double max_abs() const noexcept;

    bool operator==(const ExtendedState&) const = default;
};

/// Which copy of the doubled system is reported as the approximation of the
/// original trajectory.
enum class Projection { copy1, copy2, mean };

Projection parse_projection(const std::string& name);
std::string to_string(Projection proj);

/// Original phase point (Q, P) read off an extended state.
struct PhasePoint {
    std::vector<double> q;
    std::vector<double> p;
};

PhasePoint project(const ExtendedState& s, Projection proj = Projection::copy1);

/// Read-only view of one extended state stored in a flat buffer.
class ExtendedStateView {
public:
    ExtendedStateView(std::span<const double> data, std::size_t dim) : data_(data), dim_(dim) {}

    std::span<const double> q() const { return data_.subspan(0, dim_); }
    std::span<const double> p() const { return data_.subspan(dim_, dim_); }
    std::span<const double> x() const { return data_.subspan(2 * dim_, dim_); }
    std::span<const double> y() const { return data_.subspan(3 * dim_, dim_); }
    std::size_t dim() const noexcept { return dim_; }

    ExtendedState to_state() const;

private:
    std::span<const double> data_;
    std::size_t dim_;
};

/// Read-only view of one original phase point stored in a flat buffer.
class PhaseView {
public:
    PhaseView(std::span<const double> data, std::size_t dim) : data_(data), dim_(dim) {}

    std::span<const double> q() const { return data_.subspan(0, dim_); }
    std::span<const double> p() const { return data_.subspan(dim_, dim_); }
    std::size_t dim() const noexcept { return dim_; }

private:
    std::span<const double> data_;
    std::size_t dim_;
};

enum class Outcome { completed, escaped, step_failed };

std::string to_string(Outcome outcome);

/// Time-stamped samples of extended states, stored contiguously as
/// [q | p | x | y] blocks of length 4 * dim.
class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::size_t dim) : dim_(dim) {}

    void push_back(double t, const ExtendedState& s);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    double time(std::size_t i) const { return times_.at(i); }
    const std::vector<double>& times() const noexcept { return times_; }
    ExtendedStateView at(std::size_t i) const;
    ExtendedStateView back() const { return at(size() - 1); }

    Outcome outcome = Outcome::completed;
    /// Number of completed steps whose result passed all checks.
    std::size_t last_valid_step = 0;
    std::string message;

    bool ok() const noexcept { return outcome == Outcome::completed; }

private:
    std::size_t dim_ = 0;
    std::vector<double> times_;
    std::vector<double> data_;
};

/// Time-stamped samples of original phase points (Q, P).
class PhaseTrajectory {
public:
    PhaseTrajectory() = default;
    explicit PhaseTrajectory(std::size_t dim) : dim_(dim) {}

    void push_back(double t, std::span<const double> q, std::span<const double> p);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return times_.size(); }
    bool empty() const noexcept { return times_.empty(); }

    double time(std::size_t i) const { return times_.at(i); }
    const std::vector<double>& times() const noexcept { return times_; }
    PhaseView at(std::size_t i) const;
    PhaseView back() const { return at(size() - 1); }

    /// Series of one coordinate: component k of Q (k < dim) or of P (k >= dim).
    std::vector<double> component(std::size_t k) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> times_;
    std::vector<double> data_;
};

PhaseTrajectory project(const Trajectory& traj, Projection proj = Projection::copy1);

} // namespace tether

#endif
