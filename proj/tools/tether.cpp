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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tether/config.hpp"
#include "tether/harness.hpp"

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw tether::ConfigError(fmt::format("cannot read config file '{}'", path));
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Extended phase space integrator experiments"};
    app.set_version_flag("--version", std::string(tether::library_version()));
    app.require_subcommand(0, 1);

    std::string config_path, preset_name, out_dir = ".";
    std::size_t workers = 1;
    std::vector<std::string> overrides;
    bool list_presets = false, dump_config = false;
    app.add_flag("--list-presets", list_presets, "Print the preset names and exit");

    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"integrate", "Integrate one trajectory and write samples"},
        {"table", "Error table over omega or delta against the exact product solution"},
        {"poincare", "Section points and chaos statistic on a fixed shell"},
        {"nls", "NLS masses and running time averages"},
        {"compare", "Proposed method and RK4 against a benchmark"},
        {"check", "Reproduce the error tables and compare with the published values"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        if (std::string(c.name) == "check") {
            sub->add_option("--out,-o", out_dir, "Output directory");
            sub->add_option("--workers,-j", workers, "Worker threads")->check(CLI::PositiveNumber);
            continue;
        }
        sub->add_option("--config,-c", config_path, "Config file (key = value lines)")->check(CLI::ExistingFile);
        sub->add_option("--preset,-p", preset_name, "Start from a named preset");
        sub->add_option("--set,-s", overrides, "Override one key, as key=value")->take_all();
        sub->add_option("--out,-o", out_dir, "Output directory");
        sub->add_option("--workers,-j", workers, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_flag("--dump-config", dump_config, "Print the resolved config and exit");
    }

    CLI11_PARSE(app, argc, argv);

    if (list_presets) {
        for (const auto& name : tether::preset_names()) {
            std::cout << name << '\n';
        }
        return tether::exit_code::ok;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return tether::exit_code::config_error;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    tether::ExperimentConfig config;
    try {
        if (!preset_name.empty()) {
            config = tether::preset(preset_name);
        }
        if (!config_path.empty()) {
            config = tether::merge_config(config, read_file(config_path));
        }
        std::string text;
        for (const auto& kv : overrides) {
            text += kv + '\n';
        }
        if (!text.empty()) {
            config = tether::merge_config(config, text);
        }
        if (dump_config) {
            std::cout << tether::to_text(config);
            return tether::exit_code::ok;
        }
    } catch (const tether::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return tether::exit_code::config_error;
    }

    tether::RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.workers = workers;
    const auto result = tether::run_command(command, config, ctx);
    (result.exit_code == tether::exit_code::ok ? std::cout : std::cerr) << result.report;
    for (const auto& f : result.files) {
        std::cout << "wrote " << f.string() << '\n';
    }
    return result.exit_code;
}
