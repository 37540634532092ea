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

// Command-line experiment runner.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dysonqsd/cli/config.hpp"
#include "dysonqsd/cli/runner.hpp"
#include "dysonqsd/parallel.hpp"
#include "dysonqsd/version.hpp"

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw dysonqsd::Error("cannot read config file " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dyson Brownian motion collision and quasi-stationary experiments"};
    app.set_version_flag("--version", std::string(dysonqsd::kVersion));
    std::string config_path;
    std::size_t workers = 1;
    std::string output_dir;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "Configuration file ([section] key = value)");
    app.add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--output-dir", output_dir, "Output directory (overrides DYSONQSD_OUTPUT_DIR and the file)");
    app.add_option("--set", overrides, "Override a config key: section.key=value (repeatable)");

    std::string experiment;
    for (const auto& name : dysonqsd::cli::subcommands()) {
        auto* sub = app.add_subcommand(name, "Run the '" + name + "' experiment");
        sub->fallthrough();
        sub->callback([&experiment, name] { experiment = name; });
    }
    app.require_subcommand(0, 1);
    CLI11_PARSE(app, argc, argv);

    try {
        using namespace dysonqsd::cli;
        ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : parse_config(read_file(config_path), false);
        // Precedence: flag > environment > file > default.
        if (const char* env = std::getenv("DYSONQSD_OUTPUT_DIR"); env != nullptr && *env != '\0') {
            cfg.run.output_dir = env;
        }
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            if (eq == std::string::npos) {
                throw dysonqsd::ParseError(0, "override '" + o + "' is not section.key=value");
            }
            apply_setting(cfg, o.substr(0, eq), o.substr(eq + 1));
        }
        if (!experiment.empty()) {
            cfg.experiment = experiment;
        }
        if (!output_dir.empty()) {
            cfg.run.output_dir = output_dir;
        }
        validate(cfg);
        dysonqsd::WorkerPool pool(workers);
        const auto res = run_experiment(cfg, pool, std::cout);
        for (const auto& f : res.files) {
            std::cout << (res.output_dir / f).string() << "\n";
        }
        return res.status;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
