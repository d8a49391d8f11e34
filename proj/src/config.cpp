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

#include "tether/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "tether/models.hpp"

#ifndef TETHER_VERSION
#define TETHER_VERSION "0.0.0"
#endif

namespace tether {

std::string_view library_version() noexcept
{
    return TETHER_VERSION;
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s)
{
    std::vector<std::string_view> out;
    if (trim(s).empty()) {
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

double parse_double(const std::string& key, std::string_view v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
    }
    if (!std::isfinite(out)) {
        throw ConfigError(fmt::format("{}: value must be finite", key));
    }
    return out;
}

template <class Int>
Int parse_int(const std::string& key, std::string_view v)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(fmt::format("{}: '{}' is not a valid integer", key, v));
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& key, std::string_view v)
{
    std::vector<double> out;
    for (auto item : split_list(v)) {
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string format_double(double v)
{
    return fmt::format("{}", v);
}

std::string format_doubles(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? ", " : "") + format_double(v[i]);
    }
    return out;
}

struct KeySpec {
    std::string name;
    std::function<void(ExperimentConfig&, std::string_view)> set;
    /// Empty optional when the key is not written (unset optionals).
    std::function<std::optional<std::string>(const ExperimentConfig&)> get;
};

template <class Fn>
auto translate(const std::string& key, Fn&& fn)
{
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
}

const std::vector<KeySpec>& key_specs()
{
    using C = ExperimentConfig;
    using S = std::optional<std::string>;
    static const std::vector<KeySpec> specs = [] {
        std::vector<KeySpec> k;
        auto str = [&k](std::string name, std::string C::*field) {
            k.push_back({name, [field](C& c, std::string_view v) { c.*field = std::string(v); },
                         [field](const C& c) -> S { return c.*field; }});
        };
        auto dbl = [&k](std::string name, double C::*field) {
            k.push_back({name, [field, name](C& c, std::string_view v) { c.*field = parse_double(name, v); },
                         [field](const C& c) -> S { return format_double(c.*field); }});
        };
        auto size = [&k](std::string name, std::size_t C::*field) {
            k.push_back({name, [field, name](C& c, std::string_view v) { c.*field = parse_int<std::size_t>(name, v); },
                         [field](const C& c) -> S { return fmt::format("{}", c.*field); }});
        };
        auto list = [&k](std::string name, std::vector<double> C::*field) {
            k.push_back({name, [field, name](C& c, std::string_view v) { c.*field = parse_doubles(name, v); },
                         [field](const C& c) -> S { return format_doubles(c.*field); }});
        };

        str("system", &C::system);
        size("modes", &C::modes);
        list("q0", &C::q0);
        list("p0", &C::p0);
        str("schwarzschild_ic", &C::schwarzschild_ic);
        dbl("delta", &C::delta);
        dbl("omega", &C::omega);
        k.push_back({"order", [](C& c, std::string_view v) { c.order = parse_int<int>("order", v); },
                     [](const C& c) -> S { return fmt::format("{}", c.order); }});
        k.push_back({"n_steps", [](C& c, std::string_view v) { c.n_steps = parse_int<std::size_t>("n_steps", v); },
                     [](const C& c) -> S {
                         return c.n_steps ? S(fmt::format("{}", *c.n_steps)) : std::nullopt;
                     }});
        k.push_back({"T", [](C& c, std::string_view v) { c.final_time = parse_double("T", v); },
                     [](const C& c) -> S { return c.final_time ? S(format_double(*c.final_time)) : std::nullopt; }});
        k.push_back({"gamma_variant",
                     [](C& c, std::string_view v) {
                         c.gamma_variant = translate("gamma_variant", [&] { return parse_gamma_variant(std::string(v)); });
                     },
                     [](const C& c) -> S { return to_string(c.gamma_variant); }});
        k.push_back({"restraint_rate",
                     [](C& c, std::string_view v) {
                         c.restraint_rate =
                             translate("restraint_rate", [&] { return parse_restraint_rate(std::string(v)); });
                     },
                     [](const C& c) -> S { return to_string(c.restraint_rate); }});
        k.push_back({"projection",
                     [](C& c, std::string_view v) {
                         c.projection = translate("projection", [&] { return parse_projection(std::string(v)); });
                     },
                     [](const C& c) -> S { return to_string(c.projection); }});
        dbl("gamma", &C::gamma);
        size("stride", &C::stride);
        dbl("escape_bound", &C::escape_bound);
        str("output", &C::output);
        k.push_back({"seed", [](C& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); },
                     [](const C& c) -> S { return fmt::format("{}", c.seed); }});
        list("deltas", &C::deltas);
        list("omegas", &C::omegas);
        list("fit_exclude", &C::fit_exclude);
        dbl("shell", &C::shell);
        list("q_range", &C::q_range);
        list("p_range", &C::p_range);
        k.push_back({"grid",
                     [](C& c, std::string_view v) {
                         c.grid.clear();
                         for (auto item : split_list(v)) {
                             c.grid.push_back(parse_int<std::size_t>("grid", item));
                         }
                     },
                     [](const C& c) -> S {
                         std::string out;
                         for (std::size_t i = 0; i < c.grid.size(); ++i) {
                             out += (i ? ", " : "") + fmt::format("{}", c.grid[i]);
                         }
                         return out;
                     }});
        size("min_crossings", &C::min_crossings);
        dbl("max_time", &C::max_time);
        dbl("shell_tol", &C::shell_tol);
        str("benchmark", &C::benchmark);
        dbl("reference_tol", &C::reference_tol);
        dbl("kepler_mass", &C::kepler_mass);
        str("method", &C::method);
        return k;
    }();
    return specs;
}

const KeySpec* find_key(std::string_view name)
{
    for (const auto& spec : key_specs()) {
        if (spec.name == name) {
            return &spec;
        }
    }
    return nullptr;
}

struct Line {
    std::size_t number;
    std::string key;
    std::string value;
};

std::vector<Line> split_lines(std::string_view text)
{
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++number;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (!line.empty()) {
            const auto eq = line.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", number, line));
            }
            const auto key = trim(line.substr(0, eq));
            if (key.empty()) {
                throw ConfigError(fmt::format("line {}: missing key", number));
            }
            out.push_back({number, std::string(key), std::string(trim(line.substr(eq + 1)))});
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return out;
}

void apply_lines(ExperimentConfig& config, const std::vector<Line>& lines)
{
    std::set<std::string> seen;
    for (const auto& line : lines) {
        const auto* spec = find_key(line.key);
        if (!spec) {
            throw ConfigError(fmt::format("line {}: unknown key '{}'", line.number, line.key));
        }
        if (!seen.insert(line.key).second) {
            throw ConfigError(fmt::format("line {}: key '{}' given twice", line.number, line.key));
        }
        spec->set(config, line.value);
    }
}

} // namespace

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& spec : key_specs()) {
            out.push_back(spec.name);
        }
        return out;
    }();
    return names;
}

std::size_t ExperimentConfig::steps_for(double step) const
{
    if (!(step > 0.0)) {
        throw ConfigError(fmt::format("delta: must be positive, got {}", step));
    }
    if (!n_steps && !final_time) {
        throw ConfigError("n_steps: one of n_steps or T is required");
    }
    if (final_time) {
        if (*final_time < 0.0) {
            throw ConfigError(fmt::format("T: must be nonnegative, got {}", *final_time));
        }
        const auto n = static_cast<std::size_t>(std::llround(*final_time / step));
        if (n_steps && *n_steps != n) {
            throw ConfigError(fmt::format("n_steps: {} disagrees with T / delta = {}", *n_steps, n));
        }
        return n;
    }
    return *n_steps;
}

std::size_t ExperimentConfig::steps() const
{
    return steps_for(delta);
}

IntegratorConfig ExperimentConfig::integrator() const
{
    IntegratorConfig cfg;
    cfg.delta = delta;
    cfg.omega = omega;
    cfg.order = order;
    cfg.n_steps = steps();
    cfg.gamma_variant = gamma_variant;
    cfg.restraint_rate = restraint_rate;
    translate("integrator", [&] {
        cfg.validate();
        return 0;
    });
    return cfg;
}

std::pair<std::vector<double>, std::vector<double>> ExperimentConfig::initial_condition() const
{
    if (!q0.empty() || !p0.empty()) {
        return {q0, p0};
    }
    if (system == "product1d") {
        return {{-3.0}, {0.0}};
    }
    if (system == "schwarzschild") {
        const auto ic = translate("schwarzschild_ic", [&] {
            return schwarzschild_initial_condition(parse_schwarzschild_preset(schwarzschild_ic));
        });
        return {ic.q, ic.p};
    }
    if (system == "nls") {
        const auto ic = translate("modes", [&] { return nls_initial_condition(modes); });
        return {ic.q, ic.p};
    }
    std::vector<double> q(modes, 0.0), p(modes, 0.0);
    q[0] = 1.0;
    return {q, p};
}

void ExperimentConfig::validate() const
{
    static const std::set<std::string> systems{"product1d", "schwarzschild", "nls", "harmonic"};
    if (!systems.count(system)) {
        throw ConfigError(
            fmt::format("system: unknown model '{}' (expected product1d, schwarzschild, nls or harmonic)", system));
    }
    const auto model = translate("modes", [&] { return make_model(system, modes); });
    translate("schwarzschild_ic", [&] { return parse_schwarzschild_preset(schwarzschild_ic); });
    if (q0.size() != p0.size()) {
        throw ConfigError(fmt::format("q0: has {} entries but p0 has {}", q0.size(), p0.size()));
    }
    if (!q0.empty() && q0.size() != model->dim()) {
        throw ConfigError(fmt::format("q0: model {} needs {} entries, got {}", system, model->dim(), q0.size()));
    }
    auto positive = [](const char* key, double v) {
        if (!(v > 0.0)) {
            throw ConfigError(fmt::format("{}: must be positive, got {}", key, v));
        }
    };
    auto nonnegative = [](const char* key, double v) {
        if (!(v >= 0.0)) {
            throw ConfigError(fmt::format("{}: must be nonnegative, got {}", key, v));
        }
    };
    positive("delta", delta);
    nonnegative("omega", omega);
    if (order < 2 || order % 2 != 0) {
        throw ConfigError(fmt::format("order: must be even and >= 2, got {}", order));
    }
    if (final_time) {
        nonnegative("T", *final_time);
    }
    if (n_steps && final_time) {
        steps();
    }
    nonnegative("gamma", gamma);
    if (stride == 0) {
        throw ConfigError("stride: must be >= 1");
    }
    positive("escape_bound", escape_bound);
    for (double d : deltas) {
        positive("deltas", d);
    }
    for (double w : omegas) {
        nonnegative("omegas", w);
    }
    for (const auto& [key, range] : {std::pair{"q_range", &q_range}, std::pair{"p_range", &p_range}}) {
        if (range->size() != 2 || !((*range)[0] < (*range)[1])) {
            throw ConfigError(fmt::format("{}: expected 'lo, hi' with lo < hi", key));
        }
    }
    if (grid.size() != 2 || grid[0] == 0 || grid[1] == 0) {
        throw ConfigError("grid: expected 'nq, np' with both >= 1");
    }
    if (min_crossings == 0) {
        throw ConfigError("min_crossings: must be >= 1");
    }
    positive("max_time", max_time);
    positive("shell_tol", shell_tol);
    if (benchmark != "auto" && benchmark != "exact" && benchmark != "reference" && benchmark != "self") {
        throw ConfigError(fmt::format("benchmark: expected auto, exact, reference or self, got '{}'", benchmark));
    }
    positive("reference_tol", reference_tol);
    positive("kepler_mass", kepler_mass);
    if (method != "tether" && method != "rk4") {
        throw ConfigError(fmt::format("method: expected tether or rk4, got '{}'", method));
    }
    if (output.find('/') != std::string::npos) {
        throw ConfigError("output: must be a file stem without directories (use --out for the directory)");
    }
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig config;
    apply_lines(config, split_lines(text));
    return config;
}

ExperimentConfig merge_config(const ExperimentConfig& base, std::string_view text)
{
    ExperimentConfig config = base;
    apply_lines(config, split_lines(text));
    return config;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(fmt::format("cannot open config file '{}'", path));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& config)
{
    std::string out;
    for (const auto& spec : key_specs()) {
        if (const auto value = spec.get(config)) {
            out += fmt::format("{} = {}\n", spec.name, *value);
        }
    }
    return out;
}

std::optional<std::string> Metadata::result(const std::string& key) const
{
    for (const auto& [k, v] : results) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string to_text(const Metadata& meta)
{
    std::string out = fmt::format("# tether {} run metadata\n", library_version());
    out += to_text(meta.config);
    for (const auto& [k, v] : meta.results) {
        out += fmt::format("result.{} = {}\n", k, v);
    }
    return out;
}

Metadata parse_metadata(std::string_view text)
{
    Metadata meta;
    std::vector<Line> config_lines;
    for (auto& line : split_lines(text)) {
        if (line.key.starts_with("result.")) {
            meta.results.emplace_back(line.key.substr(7), line.value);
        } else {
            config_lines.push_back(std::move(line));
        }
    }
    apply_lines(meta.config, config_lines);
    return meta;
}

// Presets

namespace {

ExperimentConfig product_reference_run()
{
    ExperimentConfig c;
    c.system = "product1d";
    c.q0 = {-3.0};
    c.p0 = {0.0};
    c.order = 4;
    c.restraint_rate = RestraintRate::omega;
    return c;
}

ExperimentConfig section_preset(double omega, const std::string& stem)
{
    ExperimentConfig c;
    c.system = "product1d";
    c.delta = 0.01;
    c.omega = omega;
    c.order = 4;
    c.shell = 10.0;
    // The shell is reachable at x = 0 only where p^2 + (1 + omega) q^2 <= 2 shell - 2.
    const double q_max = 0.95 * std::sqrt((2.0 * c.shell - 2.0) / (1.0 + omega));
    const double p_max = 0.95 * std::sqrt(2.0 * c.shell - 2.0);
    c.q_range = {-q_max, q_max};
    c.p_range = {-p_max, p_max};
    c.grid = {8, 8};
    c.min_crossings = 500;
    c.max_time = 1e4;
    c.output = stem;
    return c;
}

const std::map<std::string, std::function<ExperimentConfig()>>& preset_table()
{
    static const std::map<std::string, std::function<ExperimentConfig()>> table{
        {"table1",
         [] {
             auto c = product_reference_run();
             c.delta = 0.001;
             c.final_time = 100.0;
             c.omegas = {20.0, 40.0, 80.0, 160.0};
             c.output = "table1";
             return c;
         }},
        {"table2",
         [] {
             auto c = product_reference_run();
             c.omega = 20.0;
             c.final_time = 100.0;
             c.deltas = {0.1, std::pow(10.0, -1.5), 0.01, std::pow(10.0, -2.5), 0.001};
             c.fit_exclude = {0.1};
             c.output = "table2";
             return c;
         }},
        {"fig1",
         [] {
             auto c = product_reference_run();
             c.delta = 0.1;
             c.omega = 20.0;
             c.final_time = 1000.0;
             c.output = "fig1";
             return c;
         }},
        {"fig5_w0", [] { return section_preset(0.0, "fig5_w0"); }},
        {"fig5_w08", [] { return section_preset(0.8, "fig5_w08"); }},
        {"fig5_w10", [] { return section_preset(10.0, "fig5_w10"); }},
        {"nls2",
         [] {
             ExperimentConfig c;
             c.system = "nls";
             c.modes = 2;
             c.delta = 0.01;
             c.omega = 100.0;
             c.final_time = 1e4;
             c.stride = 100;
             c.restraint_rate = RestraintRate::omega;
             c.output = "nls2";
             return c;
         }},
        {"nls2_long",
         [] {
             auto c = preset("nls2");
             c.final_time = 1e5;
             c.stride = 1000;
             c.output = "nls2_long";
             return c;
         }},
        {"nls5",
         [] {
             ExperimentConfig c;
             c.system = "nls";
             c.modes = 5;
             c.delta = 0.001;
             c.omega = 100.0;
             c.final_time = 1.0;
             c.stride = 10;
             c.restraint_rate = RestraintRate::omega;
             c.output = "nls5";
             return c;
         }},
        {"schwarzschild",
         [] {
             ExperimentConfig c;
             c.system = "schwarzschild";
             c.schwarzschild_ic = "constraint";
             c.delta = 0.2;
             c.omega = 2.0;
             c.order = 4;
             c.final_time = 1000.0;
             c.stride = 5;
             c.restraint_rate = RestraintRate::omega;
             c.output = "schwarzschild";
             return c;
         }},
        {"schwarzschild_long",
         [] {
             auto c = preset("schwarzschild");
             c.final_time = 5e4;
             c.stride = 250;
             c.output = "schwarzschild_long";
             return c;
         }},
        {"schwarzschild_dissipative",
         [] {
             auto c = preset("schwarzschild");
             c.gamma = 1e-4;
             c.output = "schwarzschild_dissipative";
             return c;
         }},
    };
    return table;
}

} // namespace

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, fn] : preset_table()) {
            out.push_back(name);
        }
        return out;
    }();
    return names;
}

ExperimentConfig preset(const std::string& name)
{
    const auto& table = preset_table();
    const auto it = table.find(name);
    if (it == table.end()) {
        std::string known;
        for (const auto& n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ConfigError(fmt::format("unknown preset '{}' (known: {})", name, known));
    }
    return it->second();
}

} // namespace tether
