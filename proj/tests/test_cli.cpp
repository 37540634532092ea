/*
   Copyright 2026 The dysonqsd Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "json.hpp"

#include "dysonqsd/cli/config.hpp"
#include "dysonqsd/cli/output.hpp"
#include "dysonqsd/cli/runner.hpp"
#include "dysonqsd/oracles.hpp"

using namespace dysonqsd;
using namespace dysonqsd::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("dysonqsd_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

const char* kMinimal = "[model]\nn_particles = 2\ngamma = 0.25\na = 0.5\n";

// Small but complete configuration for every subcommand.
ExperimentConfig small_config(const std::string& experiment, const fs::path& dir)
{
    std::string text = R"([model]
n_particles = 2
gamma = 0.25
a = 0.5
[scheme]
dt = 0.001
[region]
kind = gap_cap
L = 2
[run]
T = 0.2
n_paths = 20
M = 20
T_burn = 0.1
T_avg = 0.2
seed = 9
x0 = 0, 0.5
[simulate]
thin = 50
[fv]
snapshot_every = 50
[converge]
y0 = -0.5, 0.5
t_step = 0.05
n_times = 3
n_boot = 5
[survival]
record_every = 20
fit_t0 = 0.02
fit_t1 = 0.2
)";
    ExperimentConfig c = parse_config(text, false);
    c.experiment = experiment;
    c.run.output_dir = dir.string();
    if (experiment == "oracle") {
        c.oracle.kind = "beta";
    }
    validate(c);
    return c;
}

int run_tool(const std::string& args, const std::string& env = "")
{
    const std::string cmd = env + " " + DYSONQSD_TOOL_PATH + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST(ParseConfig, MinimalFillsDefaults)
{
    const auto c = parse_config(kMinimal);
    EXPECT_EQ(c.model.n_particles, 2u);
    EXPECT_EQ(c.model.gamma, 0.25);
    EXPECT_EQ(c.model.v.a, 0.5);
    EXPECT_EQ(c.experiment, "simulate");
    EXPECT_EQ(c.scheme.scheme, Scheme::sorted_tamed_explicit);
    EXPECT_EQ(c.run.output_dir, "out");
    EXPECT_FALSE(c.region.has_value());
    EXPECT_EQ(c.start(), (Configuration{-0.5, 0.5}));
}

TEST(ParseConfig, NegativeGammaNamesField)
{
    try {
        parse_config("[model]\nn_particles = 2\ngamma = -1\n");
        FAIL() << "expected ValidationError";
    }
    catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "gamma");
    }
}

TEST(ParseConfig, UnknownKeyNamesKeyAndLine)
{
    try {
        parse_config("[model]\nn_particles = 2\n\nfoo = 3\n");
        FAIL() << "expected ParseError";
    }
    catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_NE(std::string(e.what()).find("foo"), std::string::npos);
    }
}

TEST(ParseConfig, MalformedText)
{
    EXPECT_THROW(parse_config("[nope]\n"), ParseError);
    EXPECT_THROW(parse_config("[model]\ngamma 0.3\n"), ParseError);
    EXPECT_THROW(parse_config("gamma = 0.3\n"), ParseError);
    EXPECT_THROW(parse_config("[model\n"), ParseError);
    EXPECT_THROW(parse_config("[model]\ngamma = abc\n"), ValidationError);
    // Comments and blank lines are skipped.
    EXPECT_NO_THROW(parse_config("# c\n; c\n\n[model]\ngamma = 0.3  # inline\n"));
}

TEST(ParseConfig, CrossFieldChecks)
{
    auto field_of = [](const std::string& text) {
        try {
            parse_config(text);
        }
        catch (const ValidationError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field_of(std::string(kMinimal) + "[run]\nexperiment = survival\n"), "region");
    EXPECT_EQ(field_of(std::string(kMinimal) + "[run]\nexperiment = survival\nx0 = 0, 5\n[region]\nkind = gap_cap\nL = 2\n"),
              "x0");
    EXPECT_EQ(field_of(std::string(kMinimal) + "[run]\nexperiment = converge\n[region]\nkind = gap_cap\nL = 2\n"), "y0");
    EXPECT_EQ(field_of(std::string(kMinimal) + "[scheme]\ndt = 0.003\n[run]\nT = 1\n"), "T");
    EXPECT_EQ(field_of(std::string(kMinimal) + "[run]\nx0 = 1, 0\n"), "x0");
    EXPECT_EQ(field_of("[model]\nn_particles = 1\n[run]\nexperiment = collide\n"), "n_particles");
    EXPECT_EQ(field_of(std::string(kMinimal) + "[region]\nkind = box\nlo = 0, -1\nhi = 1, -0.5\n"), "region");
}

TEST(ParseConfig, CanonicalTextRoundTrip)
{
    const auto c = small_config("fv", "somewhere");
    const std::string text = to_text(c);
    const auto back = parse_config(text);
    EXPECT_EQ(to_text(back), text);
    EXPECT_EQ(back.region->cap, 2.0);
    EXPECT_EQ(back.run.x0, (std::vector<double>{0.0, 0.5}));
}

TEST(ApplySetting, OverridesAndRejectsUnknown)
{
    auto c = parse_config(kMinimal);
    apply_setting(c, "model.gamma", "0.75");
    EXPECT_EQ(c.model.gamma, 0.75);
    apply_setting(c, "scheme.scheme", "gap_implicit");
    EXPECT_EQ(c.scheme.scheme, Scheme::gap_implicit);
    EXPECT_THROW(apply_setting(c, "model.foo", "1"), ParseError);
}

TEST(Output, FormatAndChecksum)
{
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CsvTable t({"a", "b"});
    t.row_start().cell("1").cell(2.0).row_end();
    EXPECT_EQ(t.text(), "a,b\n1,2\n");
    t.row_start().cell("1");
    EXPECT_THROW(t.row_end(), InvalidArgument);
}

TEST(RunExperiment, EverySubcommandWritesItsFiles)
{
    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"simulate", {"trajectories.csv"}},
        {"collide", {"collisions.csv", "ks.json"}},
        {"survival", {"survival.csv", "lambda.json"}},
        {"fv", {"qsd_hist.csv", "fv_stats.json"}},
        {"converge", {"tv_decay.csv", "converge.json"}},
        {"oracle", {"oracle.json"}},
    };
    const std::map<std::string, std::string> headers{
        {"trajectories.csv", "time,path_id,x1,x2"},     {"collisions.csv", "path_id,collision_time"},
        {"survival.csv", "t,survival,stderr"},          {"qsd_hist.csv", "statistic,bin_lo,bin_hi,mass"},
        {"tv_decay.csv", "t,tv,stderr"},
    };
    WorkerPool pool(1);
    std::ostringstream log;
    for (const auto& [name, files] : expected) {
        const fs::path dir = scratch(name);
        const auto res = run_experiment(small_config(name, dir), pool, log);
        EXPECT_EQ(res.status, 0) << name;
        auto want = files;
        want.push_back("manifest.json");
        EXPECT_EQ(res.files, want) << name;
        const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
        EXPECT_EQ(manifest["experiment"], name);
        EXPECT_EQ(manifest["version"], kVersion);
        for (const auto& f : files) {
            ASSERT_TRUE(fs::exists(dir / f)) << f;
            EXPECT_EQ(manifest["outputs"][f], sha256_hex(slurp(dir / f))) << f;
            if (headers.count(f)) {
                EXPECT_EQ(first_line(dir / f), headers.at(f));
            }
            if (f.ends_with(".json")) {
                EXPECT_NO_THROW(nlohmann::json::parse(slurp(dir / f))) << f;
            }
            EXPECT_EQ(slurp(dir / f).find('\r'), std::string::npos);
            EXPECT_FALSE(fs::exists(dir / (f + ".tmp")));
        }
        // The manifest echoes a config that parses back to the same text.
        EXPECT_EQ(to_text(parse_config(manifest["config"].get<std::string>())), manifest["config"]);
    }
}

TEST(RunExperiment, ValidateSubcommandPasses)
{
    const fs::path dir = scratch("validate");
    WorkerPool pool(1);
    std::ostringstream log;
    const auto res = run_experiment(small_config("validate", dir), pool, log);
    EXPECT_EQ(res.status, 0) << log.str();
    const auto j = nlohmann::json::parse(slurp(dir / "validate.json"));
    EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(RunExperiment, ByteIdenticalAcrossWorkerCounts)
{
    WorkerPool one(1);
    WorkerPool three(3);
    std::ostringstream log;
    for (const std::string name : {"simulate", "collide", "survival", "fv", "converge", "oracle"}) {
        const fs::path a = scratch(name + "_w1");
        const fs::path b = scratch(name + "_w3");
        const auto ra = run_experiment(small_config(name, a), one, log);
        run_experiment(small_config(name, b), three, log);
        for (const auto& f : ra.files) {
            if (f != "manifest.json") {
                EXPECT_EQ(slurp(a / f), slurp(b / f)) << name << "/" << f;
            }
        }
    }
}

TEST(RunExperiment, SurvivalOnOracleCase)
{
    const fs::path dir = scratch("survival_oracle");
    auto c = parse_config(R"([model]
n_particles = 1
a = 0.5
[region]
kind = box
lo = -1
hi = 1
[run]
experiment = survival
T = 4
n_paths = 3000
seed = 3
x0 = 0
[survival]
fit_t0 = 1
fit_t1 = 3
)");
    c.run.output_dir = dir.string();
    WorkerPool pool(1);
    std::ostringstream log;
    run_experiment(c, pool, log);
    const auto j = nlohmann::json::parse(slurp(dir / "lambda.json"));
    const double oracle = ou_killed_oracle(-1.0, 1.0, 0.5, 2000).lambda;
    EXPECT_NEAR(j["oracle_lambda"].get<double>(), oracle, 1e-9);
    EXPECT_NEAR(j["lambda"].get<double>() / oracle, 1.0, 0.1);
}

TEST(RunExperiment, OracleOuWritesDensity)
{
    const fs::path dir = scratch("oracle_ou");
    auto c = parse_config(std::string("[model]\nn_particles = 1\na = 0.5\n[run]\nexperiment = oracle\n"));
    c.run.output_dir = dir.string();
    WorkerPool pool(1);
    std::ostringstream log;
    const auto res = run_experiment(c, pool, log);
    EXPECT_EQ(res.files, (std::vector<std::string>{"oracle_density.csv", "oracle.json", "manifest.json"}));
    const auto j = nlohmann::json::parse(slurp(dir / "oracle.json"));
    EXPECT_NEAR(j["lambda"].get<double>(), 0.79846, 1e-4);
}

TEST(Tool, VersionAndErrors)
{
    EXPECT_EQ(run_tool("--version"), 0);
    EXPECT_EQ(run_tool("--config /nonexistent/file.ini simulate"), 2);
    EXPECT_EQ(run_tool("--set model.gamma=-1 simulate"), 2);
    EXPECT_EQ(run_tool("--set model.nope=1 simulate"), 2);
    EXPECT_NE(run_tool("no_such_subcommand"), 0);
}

TEST(Tool, OverridePrecedence)
{
    const fs::path root = scratch("tool");
    fs::create_directories(root);
    const fs::path ini = root / "cfg.ini";
    std::ofstream(ini) << kMinimal << "[run]\nT = 0.01\nn_paths = 2\noutput_dir = " << (root / "from_file").string()
                       << "\n[simulate]\nthin = 1\n";
    // File only.
    ASSERT_EQ(run_tool("--config " + ini.string() + " simulate"), 0);
    EXPECT_TRUE(fs::exists(root / "from_file" / "trajectories.csv"));
    // Environment beats the file.
    ASSERT_EQ(run_tool("--config " + ini.string() + " simulate", "DYSONQSD_OUTPUT_DIR=" + (root / "from_env").string()),
              0);
    EXPECT_TRUE(fs::exists(root / "from_env" / "manifest.json"));
    // Flags beat the environment.
    ASSERT_EQ(run_tool("--config " + ini.string() + " simulate --output-dir " + (root / "from_flag").string() +
                           " --set model.gamma=0.75 --workers 2",
                       "DYSONQSD_OUTPUT_DIR=" + (root / "from_env2").string()),
              0);
    EXPECT_FALSE(fs::exists(root / "from_env2"));
    const auto m = nlohmann::json::parse(slurp(root / "from_flag" / "manifest.json"));
    EXPECT_EQ(parse_config(m["config"].get<std::string>()).model.gamma, 0.75);
    // The subcommand name beats run.experiment from the file.
    EXPECT_EQ(m["experiment"], "simulate");
}
