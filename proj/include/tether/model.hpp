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

#ifndef TETHER_MODEL_HPP
#define TETHER_MODEL_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tether {

/// Raised when a model cannot be evaluated at the requested arguments
/// (outside its domain, or a non-finite result).
class EvaluationError : public std::runtime_error {
public:
    explicit EvaluationError(const std::string& what, std::optional<std::size_t> stage = std::nullopt)
        : std::runtime_error(what), stage_(stage)
    {
    }

    /// Index of the composition stage that failed, when raised from a step.
    std::optional<std::size_t> stage() const noexcept { return stage_; }

private:
    std::optional<std::size_t> stage_;
};

/// Model argument outside its domain of definition.
class DomainError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// A Hamiltonian H(a, b) of d degrees of freedom, evaluated at arbitrary
/// (possibly mixed) position/momentum arguments. Implementations must be
/// immutable and reentrant.
class HamiltonianModel {
public:
    virtual ~HamiltonianModel() = default;

    virtual std::size_t dim() const noexcept = 0;
    virtual std::string_view name() const noexcept = 0;

    virtual double energy(std::span<const double> a, std::span<const double> b) const = 0;
    /// out = dH/da (a, b)
    virtual void grad_a(std::span<const double> a, std::span<const double> b, std::span<double> out) const = 0;
    /// out = dH/db (a, b)
    virtual void grad_b(std::span<const double> a, std::span<const double> b, std::span<double> out) const = 0;

    std::vector<double> grad_a(std::span<const double> a, std::span<const double> b) const;
    std::vector<double> grad_b(std::span<const double> a, std::span<const double> b) const;
};

} // namespace tether

#endif
