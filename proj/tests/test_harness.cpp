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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <doctest.h>

#include "tether/harness.hpp"

using namespace tether;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir()
    {
        static int counter = 0;
        path = fs::temp_directory_path() / ("tether_harness_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

double num(const std::string& s)
{
    double v = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

ExperimentConfig quick(const char* text)
{
    return parse_config(text);
}

} // namespace

TEST_CASE("integrate writes samples and a metadata sidecar")
{
    TempDir dir;
    RunContext ctx{dir.path, 1};
    const auto config = quick("delta = 0.01\nomega = 20\nT = 1\nstride = 10\noutput = run");
    const auto r = run_command("integrate", config, ctx);
    REQUIRE(r.exit_code == exit_code::ok);
    REQUIRE(r.files.size() == 2);
    const auto rows = read_csv(dir.path / "run.csv");
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == std::vector<std::string>{"t", "q1", "p1", "x1", "y1", "H", "Hbar"});
    CHECK(num(rows[1][1]) == -3.0);
    CHECK(num(rows[1][5]) == 5.0);
    CHECK(num(rows[1][6]) == 10.0);
    CHECK(num(rows[11][0]) == doctest::Approx(1.0));
    // 17 significant digits reproduce the doubles exactly.
    CHECK(rows[2][0] == "0.10000000000000001");

    const auto meta = parse_metadata(slurp(dir.path / "run.meta"));
    CHECK(meta.config == config);
    CHECK(meta.result("status") == "completed");
    CHECK(meta.result("samples") == "11");
    CHECK(meta.result("command") == "integrate");
}

TEST_CASE("outputs are byte-for-byte reproducible")
{
    TempDir a, b;
    const auto config = quick("system = nls\nmodes = 3\ndelta = 0.01\nomega = 50\nT = 2\noutput = x");
    REQUIRE(run_command("integrate", config, {a.path, 1}).exit_code == 0);
    REQUIRE(run_command("integrate", config, {b.path, 1}).exit_code == 0);
    CHECK(slurp(a.path / "x.csv") == slurp(b.path / "x.csv"));
    CHECK(slurp(a.path / "x.meta") == slurp(b.path / "x.meta"));

    const auto table = quick("delta = 0.01\nT = 5\nomegas = 5, 10, 20, 40, 80\noutput = t");
    REQUIRE(run_command("table", table, {a.path, 1}).exit_code == 0);
    REQUIRE(run_command("table", table, {b.path, 4}).exit_code == 0);
    CHECK(slurp(a.path / "t.csv") == slurp(b.path / "t.csv"));
}

TEST_CASE("table rows and fit")
{
    TempDir dir;
    const auto r = run_command("table", quick("delta = 0.01\nT = 5\nomegas = 10, 20, 40\noutput = t"), {dir.path, 2});
    REQUIRE(r.exit_code == 0);
    const auto rows = read_csv(dir.path / "t.csv");
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::vector<std::string>{"omega", "max_amplitude_error", "max_phase_error", "steps", "status"});
    CHECK(num(rows[1][0]) == 10.0);
    CHECK(rows[1][3] == "500");
    CHECK(rows[3][4] == "ok");
    CHECK(!r.result("slope_amplitude").empty());

    const auto single = run_command("table", quick("delta = 0.01\nT = 5\ndeltas = 0.01\noutput = s"), {dir.path, 1});
    REQUIRE(single.exit_code == 0);
    CHECK(read_csv(dir.path / "s.csv").size() == 2);
    CHECK(single.result("slope_amplitude").empty());

    CHECK(run_command("table", quick("T = 1\nomegas = 1\ndeltas = 0.1"), {dir.path, 1}).exit_code ==
          exit_code::config_error);
    CHECK(run_command("table", quick("T = 1"), {dir.path, 1}).exit_code == exit_code::config_error);
    CHECK(run_command("table", quick("system = nls\nT = 1\nomegas = 1"), {dir.path, 1}).exit_code ==
          exit_code::config_error);
}

TEST_CASE("poincare output and admissibility")
{
    TempDir dir;
    const auto config = quick("omega = 10\nshell = 10\nq_range = -0.5, 0.5\np_range = -2, 2\ngrid = 2, 2\n"
                              "min_crossings = 300\nmax_time = 5000\noutput = sec");
    const auto r = run_command("poincare", config, {dir.path, 2});
    REQUIRE(r.exit_code == 0);
    const auto rows = read_csv(dir.path / "sec.csv");
    CHECK(rows[0] == std::vector<std::string>{"trajectory", "crossing", "q", "p", "y", "t"});
    CHECK(rows.size() > 100);
    CHECK(fs::exists(dir.path / "sec.skips.csv"));
    CHECK(r.result("classification") == "regular");

    const auto low = run_command("poincare", merge_config(config, "shell = 0.5"), {dir.path, 1});
    CHECK(low.exit_code == exit_code::config_error);
    CHECK(low.report.find("no admissible initial conditions on shell") != std::string::npos);
    CHECK(run_command("poincare", quick("system = nls"), {dir.path, 1}).exit_code == exit_code::config_error);
}

TEST_CASE("nls observables")
{
    TempDir dir;
    const auto r = run_command("nls", quick("system = nls\nmodes = 2\ndelta = 0.01\nomega = 100\nT = 2\noutput = n"),
                               {dir.path, 1});
    REQUIRE(r.exit_code == 0);
    const auto rows = read_csv(dir.path / "n.csv");
    CHECK(rows[0] == std::vector<std::string>{"t", "H", "I", "I1", "I2", "avg1", "avg2", "gap"});
    REQUIRE(rows.size() == 202);
    CHECK(num(rows[1][2]) == doctest::Approx(10.0001));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(num(rows[i][7]) == doctest::Approx(num(rows[i][5]) - num(rows[i][6])));
    }

    const auto zero = run_command(
        "nls", quick("system = nls\nmodes = 3\nq0 = 0, 0, 0\np0 = 0, 0, 0\nT = 1\noutput = z"), {dir.path, 1});
    REQUIRE(zero.exit_code == 0);
    const auto zrows = read_csv(dir.path / "z.csv");
    for (std::size_t i = 1; i < zrows.size(); ++i) {
        for (std::size_t k = 1; k < zrows[i].size(); ++k) {
            CHECK(num(zrows[i][k]) == 0.0);
        }
    }

    const auto rk = run_command("nls", quick("system = nls\nmethod = rk4\nT = 1\noutput = r"), {dir.path, 1});
    CHECK(rk.exit_code == 0);
    CHECK(run_command("nls", quick("T = 1"), {dir.path, 1}).exit_code == exit_code::config_error);
}

TEST_CASE("compare")
{
    TempDir dir;
    const auto self = run_command("compare", quick("T = 10\nbenchmark = self\noutput = c"), {dir.path, 1});
    REQUIRE(self.exit_code == 0);
    CHECK(num(self.result("max_error_tether")) == 0.0);
    CHECK(num(self.result("max_error_rk4")) > 0.0);

    const auto exact = run_command("compare", quick("T = 10\ndelta = 0.01\noutput = e"), {dir.path, 1});
    REQUIRE(exact.exit_code == 0);
    CHECK(exact.result("benchmark") == "exact");
    CHECK(num(exact.result("max_error_tether")) < 1e-3);

    const auto sch = run_command("compare", quick("system = schwarzschild\ndelta = 0.2\nomega = 2\n"
                                                  "restraint_rate = omega\nT = 20\nstride = 5\noutput = s"),
                                 {dir.path, 1});
    REQUIRE(sch.exit_code == 0);
    CHECK(sch.result("benchmark") == "reference");
    const auto header = read_csv(dir.path / "s.csv")[0];
    CHECK(std::find(header.begin(), header.end(), "scaled_phi_tether") != header.end());
    CHECK(!sch.result("scaled_H_rk4").empty());

    CHECK(run_command("compare", quick("system = nls\nT = 1\nstride = 3"), {dir.path, 1}).exit_code ==
          exit_code::config_error);
    CHECK(run_command("compare", quick("system = nls\nT = 1\nbenchmark = exact"), {dir.path, 1}).exit_code ==
          exit_code::config_error);
    CHECK(run_command("compare", quick("system = nls\nT = 1\nreference_tol = 1e-30"), {dir.path, 1}).exit_code ==
          exit_code::numeric_abort);
}

TEST_CASE("numeric aborts and unknown commands")
{
    TempDir dir;
    const auto r = run_command("integrate", quick("T = 1\nescape_bound = 2\noutput = esc"), {dir.path, 1});
    CHECK(r.exit_code == exit_code::numeric_abort);
    CHECK(parse_metadata(slurp(dir.path / "esc.meta")).result("status") == "escaped");
    CHECK(run_command("plot", ExperimentConfig{}, {dir.path, 1}).exit_code == exit_code::config_error);
    CHECK(run_command("integrate", quick("delta = -1\nT = 1"), {dir.path, 1}).exit_code == exit_code::config_error);
}

TEST_CASE("check mode and classification")
{
    TempDir dir;
    const auto r = cmd_check({dir.path, 4});
    CHECK(r.exit_code == exit_code::ok);
    CHECK(r.report.find("FAIL") == std::string::npos);
    CHECK(classify_section(0.3) == "chaotic");
    CHECK(classify_section(0.2) == "chaotic");
    CHECK(classify_section(0.01) == "regular");
    CHECK(classify_section(0.1) == "intermediate");
    CHECK(format_value(0.1) == "0.10000000000000001");
}
