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

#ifndef TETHER_HARNESS_HPP
#define TETHER_HARNESS_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tether/config.hpp"

namespace tether {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int config_error = 2;
inline constexpr int numeric_abort = 3;
inline constexpr int check_failed = 4;
} // namespace exit_code

struct RunContext {
    std::filesystem::path out_dir = ".";
    std::size_t workers = 1;
};

struct CommandResult {
    int exit_code = exit_code::ok;
    /// Files written, in order.
    std::vector<std::filesystem::path> files;
    /// Key results, also stored in the metadata sidecar.
    std::vector<std::pair<std::string, std::string>> results;
    /// Human-readable report for stdout.
    std::string report;

    std::string result(const std::string& key) const;
};

/// Sample CSV "t,q1..,p1..,x1..,y1..,H,Hbar" plus `<stem>.meta`.
CommandResult cmd_integrate(const ExperimentConfig& config, const RunContext& ctx);
/// Scan over `omegas` or `deltas` against the product-model oracle.
CommandResult cmd_table(const ExperimentConfig& config, const RunContext& ctx);
/// Section points, skip log and chaos statistic.
CommandResult cmd_poincare(const ExperimentConfig& config, const RunContext& ctx);
/// NLS energies, masses, running averages and gap per sample.
CommandResult cmd_nls(const ExperimentConfig& config, const RunContext& ctx);
/// Proposed method and RK4 at the same step against a benchmark.
CommandResult cmd_compare(const ExperimentConfig& config, const RunContext& ctx);
/// Runs the table presets and checks them against the published values.
CommandResult cmd_check(const RunContext& ctx);

/// Chaos-statistic thresholds for section classification.
inline constexpr double chaotic_threshold = 0.2;
inline constexpr double regular_threshold = 0.02;
std::string classify_section(double statistic);

/// Dispatches by name. Maps ConfigError to exit code 2 and numeric or
/// analysis failures to 3; the message is put in `report`.
CommandResult run_command(const std::string& name, const ExperimentConfig& config, const RunContext& ctx);

/// "{:.17g}"
std::string format_value(double v);

} // namespace tether

#endif
