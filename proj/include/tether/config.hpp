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

#ifndef TETHER_CONFIG_HPP
#define TETHER_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tether/integrator.hpp"
#include "tether/state.hpp"

namespace tether {

/// Invalid configuration text or values. The message names the key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string_view library_version() noexcept;

/// Flat experiment description. The text form is one `key = value` per
/// line; `#` starts a comment and lists are comma separated.
struct ExperimentConfig {
    std::string system = "product1d";
    /// NLS mode count, or harmonic dimension.
    std::size_t modes = 2;
    /// Empty means the model's default initial data.
    std::vector<double> q0;
    std::vector<double> p0;
    std::string schwarzschild_ic = "constraint";

    double delta = 0.01;
    double omega = 20.0;
    int order = 4;
    std::optional<std::size_t> n_steps;
    /// Final time; key `T`.
    std::optional<double> final_time;
    GammaVariant gamma_variant = GammaVariant::standard;
    RestraintRate restraint_rate = RestraintRate::twice_omega;
    Projection projection = Projection::copy1;
    /// Linear damping coefficient; 0 is conservative.
    double gamma = 0.0;
    std::size_t stride = 1;
    double escape_bound = 1e12;
    /// Output file stem inside the output directory.
    std::string output;
    std::uint64_t seed = 0;

    // table
    std::vector<double> deltas;
    std::vector<double> omegas;
    /// Scan values left out of the slope fit.
    std::vector<double> fit_exclude;

    // poincare
    double shell = 10.0;
    std::vector<double> q_range{-3.0, 3.0};
    std::vector<double> p_range{-3.0, 3.0};
    std::vector<std::size_t> grid{8, 8};
    std::size_t min_crossings = 500;
    double max_time = 1e4;
    double shell_tol = 1e-3;

    // compare and nls
    /// auto, exact, reference or self (the proposed run itself).
    std::string benchmark = "auto";
    double reference_tol = 1e-11;
    double kepler_mass = 1.0;
    /// tether or rk4 (nls only).
    std::string method = "tether";

    bool operator==(const ExperimentConfig&) const = default;

    /// Step count from n_steps and/or T at the configured delta.
    std::size_t steps() const;
    std::size_t steps_for(double step) const;
    IntegratorConfig integrator() const;
    /// Resolved initial data (explicit vectors or model defaults).
    std::pair<std::vector<double>, std::vector<double>> initial_condition() const;
    /// Throws ConfigError on the first invalid value.
    void validate() const;
};

/// Names of every accepted key, in serialization order.
const std::vector<std::string>& config_keys();

/// Parses config text. Unknown or repeated keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Applies `text` on top of `base` (keys in `text` win).
ExperimentConfig merge_config(const ExperimentConfig& base, std::string_view text);

/// Text form that parses back to an equal config.
std::string to_text(const ExperimentConfig& config);

/// Run results appended to a config in a sidecar file as `result.<key> = value`.
struct Metadata {
    ExperimentConfig config;
    std::vector<std::pair<std::string, std::string>> results;

    std::optional<std::string> result(const std::string& key) const;
};

std::string to_text(const Metadata& meta);
Metadata parse_metadata(std::string_view text);

/// Named parameter sets for the reference experiments.
const std::vector<std::string>& preset_names();
/// Throws ConfigError for unknown names.
ExperimentConfig preset(const std::string& name);

} // namespace tether

#endif
