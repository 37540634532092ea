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

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dysonqsd/cli/config.hpp"
#include "dysonqsd/cli/output.hpp"
#include "dysonqsd/cli/validate.hpp"
#include "dysonqsd/collision.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/oracles.hpp"
#include "dysonqsd/parallel.hpp"
#include "dysonqsd/qsd.hpp"
#include "dysonqsd/stats.hpp"
#include "dysonqsd/version.hpp"

namespace dysonqsd::cli {

using json = nlohmann::ordered_json;

struct RunResult {
    int status = 0;
    std::filesystem::path output_dir;
    /// Output files written, manifest last.
    std::vector<std::string> files;
};

namespace detail {

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Oracle interval for one particle, or nothing if the setting has none.
inline std::optional<std::pair<double, double>> ou_interval(const ExperimentConfig& c)
{
    if (c.model.n_particles != 1 || c.model.v.kind != VSpec::Kind::quadratic || !(c.model.v.a > 0.0) || !c.region) {
        return std::nullopt;
    }
    const Region& r = *c.region;
    if (r.kind == Region::Kind::box) {
        return std::pair{r.lo[0], r.hi[0]};
    }
    if (r.kind == Region::Kind::half_below) {
        // Truncate the far side where the stationary law has no mass.
        const double sd = 1.0 / std::sqrt(4.0 * c.model.v.a);
        return std::pair{std::min(r.bound, 0.0) - 12.0 * sd, r.bound};
    }
    return std::nullopt;
}

inline void run_simulate(const ExperimentConfig& c, WorkerPool& pool, OutputSet& out)
{
    const Configuration x0 = c.start();
    const std::uint64_t n_steps = step_count(c.run.T, c.scheme.dt);
    const std::uint64_t thin = c.simulate.thin;
    std::vector<std::string> header{"time", "path_id"};
    for (std::size_t i = 0; i < c.model.n_particles; ++i) {
        header.push_back("x" + std::to_string(i + 1));
    }
    CsvTable table(header);
    std::vector<std::string> rows(c.run.n_paths);
    std::vector<Stepper> steppers;
    for (std::size_t w = 0; w < pool.size(); ++w) {
        steppers.emplace_back(c.model, c.scheme);
    }
    auto emit = [&](std::string& dst, std::uint64_t k, std::size_t path, std::span<const double> x) {
        dst += format_number(static_cast<double>(k) * c.scheme.dt) + "," + std::to_string(path);
        for (double v : x) {
            dst += "," + format_number(v);
        }
        dst += "\n";
    };
    pool.parallel_for_worker(c.run.n_paths, [&](std::size_t i, std::size_t w) {
        std::string& dst = rows[i];
        emit(dst, 0, i, x0.values());
        const NoiseStream s{c.run.seed, i, 1, false};
        run_path(x0.values(), n_steps, steppers[w], s, [&](std::uint64_t k, std::span<const double> x, bool) {
            if (k % thin == 0 || k == n_steps) {
                emit(dst, k, i, x);
            }
            return true;
        });
    });
    for (const auto& r : rows) {
        table.append_raw(r);
    }
    out.write("trajectories.csv", table.text());
}

inline void run_collide(const ExperimentConfig& c, WorkerPool& pool, OutputSet& out)
{
    const Configuration x0 = c.start();
    const std::uint64_t n_steps = step_count(c.run.T, c.scheme.dt);
    const double scale = std::isfinite(x0.min_gap()) && x0.min_gap() > 0.0 ? x0.min_gap() : 1.0;
    const double threshold =
        c.collide.threshold > 0.0 ? c.collide.threshold : default_collision_threshold(scale, c.scheme.dt);
    std::vector<double> times(c.run.n_paths, std::numeric_limits<double>::infinity());
    std::vector<Stepper> steppers;
    for (std::size_t w = 0; w < pool.size(); ++w) {
        steppers.emplace_back(c.model, c.scheme);
    }
    pool.parallel_for_worker(c.run.n_paths, [&](std::size_t i, std::size_t w) {
        const NoiseStream s{c.run.seed, i, 1, false};
        std::optional<BridgeCorrection> bridge;
        if (c.collide.bridge) {
            bridge = BridgeCorrection{c.model.gamma, c.scheme.dt, s};
        }
        CollisionDetector det(threshold, bridge);
        det.start(x0.values());
        run_path(x0.values(), n_steps, steppers[w], s, [&](std::uint64_t k, std::span<const double> x, bool crossed) {
            if (det.observe(k, x, crossed)) {
                times[i] = static_cast<double>(k) * c.scheme.dt;
                return false;
            }
            return true;
        });
    });
    CsvTable table({"path_id", "collision_time"});
    std::size_t hits = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        table.row_start().cell(i).cell(times[i]).row_end();
        hits += std::isfinite(times[i]) ? 1 : 0;
    }
    out.write("collisions.csv", table.text());

    json j;
    j["n_paths"] = c.run.n_paths;
    j["horizon"] = c.run.T;
    j["threshold"] = threshold;
    j["bridge"] = c.collide.bridge;
    j["collision_fraction"] = static_cast<double>(hits) / static_cast<double>(c.run.n_paths);
    const bool exact = c.model.n_particles == 2 && c.model.v.kind == VSpec::Kind::zero && c.model.gamma < 0.5;
    if (exact) {
        // The squared gap run at half speed is BESQ(2 gamma + 1).
        const double delta = 2.0 * c.model.gamma + 1.0;
        const double start = 0.5 * (x0[1] - x0[0]) * (x0[1] - x0[0]);
        BesqOracleOptions opt;
        opt.horizon = c.run.T;
        opt.seed = c.run.seed;
        const std::size_t n_oracle = c.collide.oracle_samples ? c.collide.oracle_samples : c.run.n_paths;
        const auto oracle = besq_hitting_oracle(delta, start, n_oracle, c.scheme.dt, opt, pool);
        auto cdf = [&](double t) { return besq_hitting_cdf(delta, start, t); };
        j["besq_dimension"] = delta;
        j["besq_start"] = start;
        j["oracle_samples"] = n_oracle;
        j["ks_stat"] = stats::ks_two_sample(times, oracle);
        j["oracle_ks_closed_form"] = stats::ks_against_cdf(oracle, cdf, c.run.T);
        j["model_ks_closed_form"] = stats::ks_against_cdf(times, cdf, c.run.T);
        j["p_value_note"] = "two-sample KS on samples censored at the horizon; 5% critical value about " +
                            format_number(1.358 * std::sqrt(1.0 / static_cast<double>(c.run.n_paths) +
                                                            1.0 / static_cast<double>(n_oracle)));
    }
    else {
        j["ks_stat"] = nullptr;
        j["p_value_note"] = "no exact collision law for this setting (needs N = 2, potential = zero, gamma < 1/2)";
    }
    out.write("ks.json", dump(j));
}

inline void run_survival(const ExperimentConfig& c, WorkerPool& pool, OutputSet& out)
{
    KilledRunOptions opt;
    opt.n_paths = c.run.n_paths;
    opt.seed = c.run.seed;
    const auto curve =
        survival_curve(c.start(), *c.region, c.run.T, c.scheme, c.model, opt, pool, c.survival.record_every);
    CsvTable table({"t", "survival", "stderr"});
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
        table.row_start().cell(curve.times[i]).cell(curve.survival[i]).cell(curve.stderr_[i]).row_end();
    }
    out.write("survival.csv", table.text());
    const auto fit = estimate_lambda(curve, c.survival.fit_t0, c.survival.fit_t1);
    json j;
    j["lambda"] = fit.lambda;
    j["r2"] = fit.r2;
    j["fit_t0"] = c.survival.fit_t0;
    j["fit_t1"] = c.survival.fit_t1;
    j["fit_points"] = fit.points;
    j["n_paths"] = curve.n_paths;
    j["alive_at_T"] = curve.n_alive;
    if (const auto iv = ou_interval(c)) {
        const auto o = ou_killed_oracle(iv->first, iv->second, c.model.v.a, c.oracle.grid_size);
        j["oracle_lambda"] = o.lambda;
        j["relative_error"] = std::abs(fit.lambda - o.lambda) / o.lambda;
    }
    out.write("lambda.json", dump(j));
}

inline void run_fv(const ExperimentConfig& c, WorkerPool& pool, OutputSet& out)
{
    FVOptions opt;
    opt.m = c.run.M;
    opt.t_burn = c.run.T_burn;
    opt.t_avg = c.run.T_avg;
    opt.seed = c.run.seed;
    opt.snapshot_every = c.fv.snapshot_every;
    const auto res = fv_run(SampleMeasure::point(c.start()), *c.region, c.scheme, c.model, opt, pool);
    const Statistic stat = c.statistic();
    const Binning bins = c.binning();
    const auto h = histogram(res.estimate, stat, bins);
    CsvTable table({"statistic", "bin_lo", "bin_hi", "mass"});
    for (std::size_t i = 0; i < bins.n_bins; ++i) {
        table.row_start().cell(stat.name()).cell(bins.edge(i)).cell(bins.edge(i + 1)).cell(h.mass[i]).row_end();
    }
    out.write("qsd_hist.csv", table.text());
    json j;
    j["lambda"] = res.lambda;
    j["resamples"] = res.resamples;
    j["M"] = c.run.M;
    j["T_burn"] = c.run.T_burn;
    j["T_avg"] = c.run.T_avg;
    j["snapshots"] = res.estimate.size() / c.run.M;
    if (const auto iv = ou_interval(c)) {
        const auto o = ou_killed_oracle(iv->first, iv->second, c.model.v.a, c.oracle.grid_size);
        j["oracle_lambda"] = o.lambda;
        if (stat == Statistic::coordinate(0)) {
            j["oracle_tv"] = tv_distance(h, oracle_histogram(o, bins));
        }
    }
    out.write("fv_stats.json", dump(j));
}

inline void run_converge(const ExperimentConfig& c, WorkerPool& pool, OutputSet& out)
{
    std::vector<double> times;
    for (std::size_t k = 1; k <= c.converge.n_times; ++k) {
        times.push_back(c.converge.t_step * static_cast<double>(k));
    }
    KilledRunOptions ox;
    ox.n_paths = c.run.n_paths;
    ox.seed = c.run.seed;
    KilledRunOptions oy = ox;
    oy.first_path = c.run.n_paths;
    const auto sx = conditioned_samples(SampleMeasure::point(c.start()), *c.region, times, c.scheme, c.model, ox, pool);
    const auto sy = conditioned_samples(SampleMeasure::point(Configuration(c.converge.y0)), *c.region, times, c.scheme,
                                        c.model, oy, pool);
    CsvTable table({"t", "tv", "stderr"});
    std::vector<double> ft;
    std::vector<double> fy;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (sx[k].n_survived == 0 || sy[k].n_survived == 0) {
            throw NoSurvivors("no survivors at t = " + format_number(times[k]));
        }
        const auto est = tv_with_bootstrap(sx[k].survivors, sy[k].survivors, c.statistic(), c.binning(),
                                           c.converge.n_boot, c.run.seed + k);
        table.row_start().cell(times[k]).cell(est.tv).cell(est.stderr_).row_end();
        const double surv_x = static_cast<double>(sx[k].n_survived) / static_cast<double>(c.run.n_paths);
        const double surv_y = static_cast<double>(sy[k].n_survived) / static_cast<double>(c.run.n_paths);
        if (surv_x > 0.01 && surv_y > 0.01 && est.tv > 0.0) {
            ft.push_back(times[k]);
            fy.push_back(std::log(est.tv));
        }
    }
    out.write("tv_decay.csv", table.text());
    json j;
    if (ft.size() >= 2) {
        const auto fit = stats::linear_fit(ft, fy);
        j["slope"] = fit.slope;
        j["r2"] = fit.r2;
        j["intercept"] = fit.intercept;
    }
    else {
        j["slope"] = nullptr;
        j["r2"] = nullptr;
    }
    j["fit_points"] = ft.size();
    out.write("converge.json", dump(j));
}

inline void run_oracle(const ExperimentConfig& c, OutputSet& out)
{
    json j;
    j["kind"] = c.oracle.kind;
    if (c.oracle.kind == "ou") {
        const double a = c.model.v.coefficient();
        const auto o = ou_killed_oracle(c.oracle.l, c.oracle.r, a, c.oracle.grid_size);
        j["l"] = c.oracle.l;
        j["r"] = c.oracle.r;
        j["a"] = a;
        j["grid_size"] = c.oracle.grid_size;
        j["lambda"] = o.lambda;
        const double x0 = c.start()[0];
        j["x0"] = x0;
        j["mean_exit_time"] = ou_mean_exit_time(c.oracle.l, c.oracle.r, a, c.oracle.grid_size, x0);
        CsvTable table({"x", "phi", "rho"});
        for (std::size_t i = 0; i < o.x.size(); ++i) {
            table.row_start().cell(o.x[i]).cell(o.phi[i]).cell(o.rho[i]).row_end();
        }
        out.write("oracle_density.csv", table.text());
    }
    else {
        if (c.model.v.kind != VSpec::Kind::quadratic || !(c.model.v.a > 0.0)) {
            throw InvalidArgument("the beta-ensemble oracle needs a quadratic potential with a > 0");
        }
        j["gamma"] = c.model.gamma;
        j["a"] = c.model.v.a;
        for (Moment m : {Moment::gap, Moment::gap_squared, Moment::sum, Moment::sum_squared}) {
            j[std::string("E_") + to_string(m)] = beta_ensemble_moment_oracle(c.model.gamma, c.model.v.a, m);
        }
    }
    out.write("oracle.json", dump(j));
}

inline int run_validate(const ExperimentConfig& c, WorkerPool& pool, OutputSet& out, std::ostream& log)
{
    const auto results = run_invariant_suite(c.run.seed, pool);
    json j;
    json arr = json::array();
    bool all = true;
    for (const auto& r : results) {
        arr.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        log << (r.pass ? "PASS " : "FAIL ") << r.name << (r.pass ? "" : ": " + r.detail) << "\n";
        all = all && r.pass;
    }
    j["passed"] = all;
    j["checks"] = arr;
    out.write("validate.json", dump(j));
    return all ? 0 : 1;
}

inline void write_manifest(const ExperimentConfig& c, const OutputSet& out, double seconds)
{
    json j;
    j["artifact"] = "dysonqsd";
    j["version"] = kVersion;
    j["experiment"] = c.experiment;
    j["seed"] = c.run.seed;
    j["wall_clock_seconds"] = seconds;
    j["config"] = to_text(c);
    json sums = json::object();
    for (const auto& name : out.names()) {
        sums[name] = out.checksums().at(name);
    }
    j["outputs"] = sums;
    atomic_write(out.dir() / "manifest.json", dump(j));
}

}  // namespace detail

/// Runs `c.experiment`, writing outputs into c.run.output_dir. Module errors
/// propagate as exceptions; the manifest is written only on success.
inline RunResult run_experiment(const ExperimentConfig& c, WorkerPool& pool, std::ostream& log)
{
    validate(c);
    const auto t0 = std::chrono::steady_clock::now();
    OutputSet out(c.run.output_dir);
    RunResult res;
    res.output_dir = c.run.output_dir;
    if (c.experiment == "simulate") {
        detail::run_simulate(c, pool, out);
    }
    else if (c.experiment == "collide") {
        detail::run_collide(c, pool, out);
    }
    else if (c.experiment == "survival") {
        detail::run_survival(c, pool, out);
    }
    else if (c.experiment == "fv") {
        detail::run_fv(c, pool, out);
    }
    else if (c.experiment == "converge") {
        detail::run_converge(c, pool, out);
    }
    else if (c.experiment == "oracle") {
        detail::run_oracle(c, out);
    }
    else if (c.experiment == "validate") {
        res.status = detail::run_validate(c, pool, out, log);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (res.status == 0) {
        detail::write_manifest(c, out, seconds);
    }
    res.files = out.names();
    if (res.status == 0) {
        res.files.push_back("manifest.json");
    }
    return res;
}

}  // namespace dysonqsd::cli
