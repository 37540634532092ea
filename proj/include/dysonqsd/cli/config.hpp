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

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dysonqsd/errors.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/oracles.hpp"
#include "dysonqsd/qsd.hpp"

namespace dysonqsd::cli {

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"simulate", "collide", "survival", "fv", "converge", "oracle", "validate"};
    return names;
}

struct RunSection {
    double T = 1.0;
    std::size_t n_paths = 100;
    std::size_t M = 1000;
    double T_burn = 5.0;
    double T_avg = 20.0;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    /// Empty means the default start: equally spaced, unit gaps, centred.
    std::vector<double> x0;
};

struct SimulateSection {
    /// Keep every `thin`-th grid point.
    std::uint64_t thin = 100;
};

struct CollideSection {
    /// <= 0 selects max(1e-4 * scale, 10 sqrt(dt)).
    double threshold = 0.0;
    bool bridge = true;
    /// Oracle sample count; 0 means n_paths.
    std::size_t oracle_samples = 0;
};

struct SurvivalSection {
    std::uint64_t record_every = 100;
    double fit_t0 = 1.0;
    double fit_t1 = 3.0;
};

struct HistogramSection {
    std::string statistic = "min_gap";
    double bin_lo = 0.0;
    double bin_hi = 4.0;
    std::size_t n_bins = 40;
};

struct FvSection {
    std::uint64_t snapshot_every = 1000;
};

struct ConvergeSection {
    /// Second start; required by `converge`.
    std::vector<double> y0;
    double t_step = 0.25;
    std::size_t n_times = 8;
    std::size_t n_boot = 50;
};

struct OracleSection {
    std::string kind = "ou";
    double l = -1.0;
    double r = 1.0;
    std::size_t grid_size = 2000;
};

struct ExperimentConfig {
    std::string experiment = "simulate";
    ModelParams model;
    SchemeConfig scheme;
    std::optional<Region> region;
    RunSection run;
    SimulateSection simulate;
    CollideSection collide;
    SurvivalSection survival;
    HistogramSection histogram;
    FvSection fv;
    ConvergeSection converge;
    OracleSection oracle;

    /// The start configuration, default filled in.
    Configuration start() const
    {
        if (!run.x0.empty()) {
            return Configuration(run.x0);
        }
        std::vector<double> x(model.n_particles);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = static_cast<double>(i) - 0.5 * static_cast<double>(x.size() - 1);
        }
        return Configuration(std::move(x));
    }

    Statistic statistic() const
    {
        if (histogram.statistic == "min_gap") {
            return Statistic::min_gap();
        }
        if (histogram.statistic == "center_of_mass") {
            return Statistic::center_of_mass();
        }
        return Statistic::coordinate(std::stoul(histogram.statistic.substr(1)) - 1);
    }

    Binning binning() const { return {histogram.bin_lo, histogram.bin_hi, histogram.n_bins}; }
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& field, const std::string& v)
{
    errno = 0;
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) {
        throw ValidationError(field, "expected a number, got '" + v + "'");
    }
    return d;
}

inline std::uint64_t to_uint(const std::string& field, const std::string& v)
{
    errno = 0;
    char* end = nullptr;
    if (v.empty() || v.front() == '-') {
        throw ValidationError(field, "expected a non-negative integer, got '" + v + "'");
    }
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || errno == ERANGE) {
        throw ValidationError(field, "expected a non-negative integer, got '" + v + "'");
    }
    return u;
}

inline bool to_bool(const std::string& field, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ValidationError(field, "expected true or false, got '" + v + "'");
}

inline std::vector<double> to_list(const std::string& field, const std::string& v)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(to_double(field, trim(item)));
    }
    return out;
}

inline std::string fmt_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + fmt_double(v[i]);
    }
    return s;
}

struct Key {
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

inline Region& region_of(ExperimentConfig& c)
{
    if (!c.region) {
        c.region = Region{};
    }
    return *c.region;
}

// Declarative key table: "section.key" -> setter/getter.
inline const std::map<std::string, Key>& keys()
{
    using C = ExperimentConfig;
    using S = const std::string&;
    static const std::map<std::string, Key> table{
        {"run.experiment", {[](C& c, S v) { c.experiment = v; }, [](const C& c) { return c.experiment; }}},
        {"model.n_particles",
         {[](C& c, S v) { c.model.n_particles = to_uint("n_particles", v); },
          [](const C& c) { return std::to_string(c.model.n_particles); }}},
        {"model.gamma",
         {[](C& c, S v) { c.model.gamma = to_double("gamma", v); },
          [](const C& c) { return fmt_double(c.model.gamma); }}},
        {"model.a",
         {[](C& c, S v) { c.model.v.a = to_double("a", v); }, [](const C& c) { return fmt_double(c.model.v.a); }}},
        {"model.potential",
         {[](C& c, S v) {
              if (v == "quadratic") {
                  c.model.v.kind = VSpec::Kind::quadratic;
              }
              else if (v == "zero") {
                  c.model.v.kind = VSpec::Kind::zero;
              }
              else {
                  throw ValidationError("potential", "expected quadratic or zero, got '" + v + "'");
              }
          },
          [](const C& c) { return std::string(c.model.v.kind == VSpec::Kind::zero ? "zero" : "quadratic"); }}},
        {"scheme.scheme",
         {[](C& c, S v) {
              if (v == "sorted_tamed_explicit" || v == "explicit") {
                  c.scheme.scheme = Scheme::sorted_tamed_explicit;
              }
              else if (v == "gap_implicit" || v == "implicit") {
                  c.scheme.scheme = Scheme::gap_implicit;
              }
              else if (v == "yosida_penalized" || v == "yosida") {
                  c.scheme.scheme = Scheme::yosida_penalized;
              }
              else {
                  throw ValidationError("scheme", "unknown scheme '" + v + "'");
              }
          },
          [](const C& c) { return std::string(to_string(c.scheme.scheme)); }}},
        {"scheme.dt",
         {[](C& c, S v) { c.scheme.dt = to_double("dt", v); }, [](const C& c) { return fmt_double(c.scheme.dt); }}},
        {"scheme.taming_cap",
         {[](C& c, S v) { c.scheme.taming_cap = to_double("taming_cap", v); },
          [](const C& c) { return fmt_double(c.scheme.taming_cap); }}},
        {"scheme.prox_tol",
         {[](C& c, S v) { c.scheme.prox_tol = to_double("prox_tol", v); },
          [](const C& c) { return fmt_double(c.scheme.prox_tol); }}},
        {"scheme.penalty_n",
         {[](C& c, S v) { c.scheme.penalty_n = to_double("penalty_n", v); },
          [](const C& c) { return fmt_double(c.scheme.penalty_n); }}},
        {"scheme.prox_max_iter",
         {[](C& c, S v) { c.scheme.prox_max_iter = static_cast<int>(to_uint("prox_max_iter", v)); },
          [](const C& c) { return std::to_string(c.scheme.prox_max_iter); }}},
        {"region.kind",
         {[](C& c, S v) {
              Region& r = region_of(c);
              if (v == "box") {
                  r.kind = Region::Kind::box;
              }
              else if (v == "gap_cap") {
                  r.kind = Region::Kind::gap_cap;
              }
              else if (v == "half_below") {
                  r.kind = Region::Kind::half_below;
              }
              else {
                  throw ValidationError("kind", "expected box, gap_cap or half_below, got '" + v + "'");
              }
          },
          [](const C& c) {
              if (!c.region) {
                  return std::string();
              }
              switch (c.region->kind) {
              case Region::Kind::box: return std::string("box");
              case Region::Kind::gap_cap: return std::string("gap_cap");
              case Region::Kind::half_below: return std::string("half_below");
              }
              return std::string();
          }}},
        {"region.lo",
         {[](C& c, S v) { region_of(c).lo = to_list("lo", v); },
          [](const C& c) { return c.region ? fmt_list(c.region->lo) : std::string(); }}},
        {"region.hi",
         {[](C& c, S v) { region_of(c).hi = to_list("hi", v); },
          [](const C& c) { return c.region ? fmt_list(c.region->hi) : std::string(); }}},
        {"region.L",
         {[](C& c, S v) { region_of(c).cap = to_double("L", v); },
          [](const C& c) { return c.region ? fmt_double(c.region->cap) : std::string(); }}},
        {"region.b",
         {[](C& c, S v) { region_of(c).bound = to_double("b", v); },
          [](const C& c) { return c.region ? fmt_double(c.region->bound) : std::string(); }}},
        {"run.T", {[](C& c, S v) { c.run.T = to_double("T", v); }, [](const C& c) { return fmt_double(c.run.T); }}},
        {"run.n_paths",
         {[](C& c, S v) { c.run.n_paths = to_uint("n_paths", v); },
          [](const C& c) { return std::to_string(c.run.n_paths); }}},
        {"run.M", {[](C& c, S v) { c.run.M = to_uint("M", v); }, [](const C& c) { return std::to_string(c.run.M); }}},
        {"run.T_burn",
         {[](C& c, S v) { c.run.T_burn = to_double("T_burn", v); },
          [](const C& c) { return fmt_double(c.run.T_burn); }}},
        {"run.T_avg",
         {[](C& c, S v) { c.run.T_avg = to_double("T_avg", v); },
          [](const C& c) { return fmt_double(c.run.T_avg); }}},
        {"run.seed",
         {[](C& c, S v) { c.run.seed = to_uint("seed", v); }, [](const C& c) { return std::to_string(c.run.seed); }}},
        {"run.output_dir",
         {[](C& c, S v) { c.run.output_dir = v; }, [](const C& c) { return c.run.output_dir; }}},
        {"run.x0",
         {[](C& c, S v) { c.run.x0 = to_list("x0", v); }, [](const C& c) { return fmt_list(c.run.x0); }}},
        {"simulate.thin",
         {[](C& c, S v) { c.simulate.thin = to_uint("thin", v); },
          [](const C& c) { return std::to_string(c.simulate.thin); }}},
        {"collide.threshold",
         {[](C& c, S v) { c.collide.threshold = to_double("threshold", v); },
          [](const C& c) { return fmt_double(c.collide.threshold); }}},
        {"collide.bridge",
         {[](C& c, S v) { c.collide.bridge = to_bool("bridge", v); },
          [](const C& c) { return std::string(c.collide.bridge ? "true" : "false"); }}},
        {"collide.oracle_samples",
         {[](C& c, S v) { c.collide.oracle_samples = to_uint("oracle_samples", v); },
          [](const C& c) { return std::to_string(c.collide.oracle_samples); }}},
        {"survival.record_every",
         {[](C& c, S v) { c.survival.record_every = to_uint("record_every", v); },
          [](const C& c) { return std::to_string(c.survival.record_every); }}},
        {"survival.fit_t0",
         {[](C& c, S v) { c.survival.fit_t0 = to_double("fit_t0", v); },
          [](const C& c) { return fmt_double(c.survival.fit_t0); }}},
        {"survival.fit_t1",
         {[](C& c, S v) { c.survival.fit_t1 = to_double("fit_t1", v); },
          [](const C& c) { return fmt_double(c.survival.fit_t1); }}},
        {"histogram.statistic",
         {[](C& c, S v) { c.histogram.statistic = v; }, [](const C& c) { return c.histogram.statistic; }}},
        {"histogram.bin_lo",
         {[](C& c, S v) { c.histogram.bin_lo = to_double("bin_lo", v); },
          [](const C& c) { return fmt_double(c.histogram.bin_lo); }}},
        {"histogram.bin_hi",
         {[](C& c, S v) { c.histogram.bin_hi = to_double("bin_hi", v); },
          [](const C& c) { return fmt_double(c.histogram.bin_hi); }}},
        {"histogram.n_bins",
         {[](C& c, S v) { c.histogram.n_bins = to_uint("n_bins", v); },
          [](const C& c) { return std::to_string(c.histogram.n_bins); }}},
        {"fv.snapshot_every",
         {[](C& c, S v) { c.fv.snapshot_every = to_uint("snapshot_every", v); },
          [](const C& c) { return std::to_string(c.fv.snapshot_every); }}},
        {"converge.y0",
         {[](C& c, S v) { c.converge.y0 = to_list("y0", v); }, [](const C& c) { return fmt_list(c.converge.y0); }}},
        {"converge.t_step",
         {[](C& c, S v) { c.converge.t_step = to_double("t_step", v); },
          [](const C& c) { return fmt_double(c.converge.t_step); }}},
        {"converge.n_times",
         {[](C& c, S v) { c.converge.n_times = to_uint("n_times", v); },
          [](const C& c) { return std::to_string(c.converge.n_times); }}},
        {"converge.n_boot",
         {[](C& c, S v) { c.converge.n_boot = to_uint("n_boot", v); },
          [](const C& c) { return std::to_string(c.converge.n_boot); }}},
        {"oracle.kind",
         {[](C& c, S v) { c.oracle.kind = v; }, [](const C& c) { return c.oracle.kind; }}},
        {"oracle.l",
         {[](C& c, S v) { c.oracle.l = to_double("l", v); }, [](const C& c) { return fmt_double(c.oracle.l); }}},
        {"oracle.r",
         {[](C& c, S v) { c.oracle.r = to_double("r", v); }, [](const C& c) { return fmt_double(c.oracle.r); }}},
        {"oracle.grid_size",
         {[](C& c, S v) { c.oracle.grid_size = to_uint("grid_size", v); },
          [](const C& c) { return std::to_string(c.oracle.grid_size); }}},
    };
    return table;
}

inline bool in_list(const std::string& v, const std::vector<std::string>& list)
{
    return std::find(list.begin(), list.end(), v) != list.end();
}

}  // namespace detail

/// Sets one `section.key` value (as from a `--set` override).
inline void apply_setting(ExperimentConfig& c, const std::string& dotted, const std::string& value)
{
    const auto& table = detail::keys();
    const auto it = table.find(dotted);
    if (it == table.end()) {
        throw ParseError(0, "unknown key '" + dotted + "'");
    }
    it->second.set(c, value);
}

/// Every field checked; throws ValidationError naming the first bad one.
inline void validate(const ExperimentConfig& c)
{
    if (!detail::in_list(c.experiment, subcommands())) {
        throw ValidationError("experiment", "unknown subcommand '" + c.experiment + "'");
    }
    const auto& m = c.model;
    if (m.n_particles < 1) {
        throw ValidationError("n_particles", "must be >= 1");
    }
    if (!(m.gamma > 0.0) || !std::isfinite(m.gamma)) {
        throw ValidationError("gamma", "must be finite and > 0");
    }
    if (m.v.kind == VSpec::Kind::quadratic && !(m.v.a >= 0.0 && std::isfinite(m.v.a))) {
        throw ValidationError("a", "must be finite and >= 0");
    }
    const auto& s = c.scheme;
    if (!(s.dt > 0.0) || !std::isfinite(s.dt)) {
        throw ValidationError("dt", "must be finite and > 0");
    }
    if (!(s.taming_cap > 0.0)) {
        throw ValidationError("taming_cap", "must be > 0");
    }
    if (!(s.prox_tol > 0.0)) {
        throw ValidationError("prox_tol", "must be > 0");
    }
    if (!(s.penalty_n >= 1.0)) {
        throw ValidationError("penalty_n", "must be >= 1");
    }
    if (s.prox_max_iter < 1) {
        throw ValidationError("prox_max_iter", "must be >= 1");
    }
    auto check_T = [&](const char* field, double T, bool positive) {
        if (!(positive ? T > 0.0 : T >= 0.0) || !std::isfinite(T)) {
            throw ValidationError(field, positive ? "must be > 0" : "must be >= 0");
        }
        try {
            step_count(T, s.dt);
        }
        catch (const InvalidArgument&) {
            throw ValidationError(field, "must be an integer multiple of dt");
        }
    };
    check_T("T", c.run.T, false);
    check_T("T_burn", c.run.T_burn, true);
    check_T("T_avg", c.run.T_avg, true);
    if (c.run.n_paths < 1) {
        throw ValidationError("n_paths", "must be >= 1");
    }
    if (c.run.M < 2) {
        throw ValidationError("M", "must be >= 2");
    }
    if (c.run.output_dir.empty()) {
        throw ValidationError("output_dir", "must not be empty");
    }
    if (!c.run.x0.empty()) {
        if (c.run.x0.size() != m.n_particles) {
            throw ValidationError("x0", "needs n_particles entries");
        }
        if (!std::is_sorted(c.run.x0.begin(), c.run.x0.end())) {
            throw ValidationError("x0", "must be weakly increasing");
        }
    }
    if (c.region) {
        try {
            c.region->validate(m.n_particles);
        }
        catch (const InvalidArgument& e) {
            throw ValidationError("region", e.what());
        }
    }
    if (c.simulate.thin < 1) {
        throw ValidationError("thin", "must be >= 1");
    }
    if (c.survival.record_every < 1) {
        throw ValidationError("record_every", "must be >= 1");
    }
    if (!(c.survival.fit_t0 < c.survival.fit_t1)) {
        throw ValidationError("fit_t1", "fit window needs fit_t0 < fit_t1");
    }
    const auto& h = c.histogram;
    const bool uses_histogram = c.experiment == "fv" || c.experiment == "converge";
    const bool coord = h.statistic.size() > 1 && h.statistic[0] == 'x' &&
                       h.statistic.find_first_not_of("0123456789", 1) == std::string::npos;
    if (!(h.statistic == "min_gap" || h.statistic == "center_of_mass" || coord)) {
        throw ValidationError("statistic", "expected min_gap, center_of_mass or x<k>");
    }
    if (coord && uses_histogram) {
        const auto k = std::stoul(h.statistic.substr(1));
        if (k < 1 || k > m.n_particles) {
            throw ValidationError("statistic", "coordinate index out of range");
        }
    }
    if (uses_histogram && h.statistic == "min_gap" && m.n_particles < 2) {
        throw ValidationError("statistic", "min_gap needs n_particles >= 2");
    }
    if (!(h.bin_lo < h.bin_hi) || h.n_bins < 1) {
        throw ValidationError("n_bins", "histogram needs bin_lo < bin_hi and n_bins >= 1");
    }
    if (c.fv.snapshot_every < 1) {
        throw ValidationError("snapshot_every", "must be >= 1");
    }
    if (!c.converge.y0.empty()) {
        if (c.converge.y0.size() != m.n_particles || !std::is_sorted(c.converge.y0.begin(), c.converge.y0.end())) {
            throw ValidationError("y0", "needs n_particles weakly increasing entries");
        }
    }
    if (!(c.converge.t_step > 0.0)) {
        throw ValidationError("t_step", "must be > 0");
    }
    if (c.converge.n_times < 3) {
        throw ValidationError("n_times", "must be >= 3");
    }
    if (c.oracle.kind != "ou" && c.oracle.kind != "beta") {
        throw ValidationError("kind", "oracle kind must be ou or beta");
    }
    if (!(c.oracle.l < c.oracle.r)) {
        throw ValidationError("r", "oracle interval needs l < r");
    }
    if (c.oracle.grid_size < 200) {
        throw ValidationError("grid_size", "must be >= 200");
    }
    const bool killed = c.experiment == "survival" || c.experiment == "fv" || c.experiment == "converge";
    if (killed) {
        if (!c.region) {
            throw ValidationError("region", "subcommand '" + c.experiment + "' needs a [region] section");
        }
        if (!c.region->contains(c.start())) {
            throw ValidationError("x0", "start must lie inside the region");
        }
    }
    if (c.experiment == "converge") {
        if (c.converge.y0.empty()) {
            throw ValidationError("y0", "converge needs a second start y0");
        }
        if (!c.region->contains(Configuration(c.converge.y0))) {
            throw ValidationError("y0", "start must lie inside the region");
        }
    }
    if (c.experiment == "collide" && m.n_particles < 2) {
        throw ValidationError("n_particles", "collide needs at least two particles");
    }
    if (c.experiment == "oracle" && c.oracle.kind == "beta" && m.n_particles != 2) {
        throw ValidationError("n_particles", "the beta-ensemble oracle is two-particle only");
    }
}

/// Parses `[section]` / `key = value` text. `#` and `;` start comments.
inline ExperimentConfig parse_config(std::string_view text, bool run_validation = true)
{
    ExperimentConfig c;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ParseError(line_no, "unterminated section header");
            }
            section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
            static const std::vector<std::string> known{"model",    "scheme",    "region", "run",      "simulate",
                                                        "collide",  "survival",  "histogram", "fv",    "converge",
                                                        "oracle"};
            if (!detail::in_list(section, known)) {
                throw ParseError(line_no, "unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(line_no, "expected key = value");
        }
        const std::string key = detail::trim(std::string_view(line).substr(0, eq));
        std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        if (const auto hash = value.find(" #"); hash != std::string::npos) {
            value = detail::trim(std::string_view(value).substr(0, hash));
        }
        if (section.empty()) {
            throw ParseError(line_no, "key '" + key + "' outside any section");
        }
        const auto& table = detail::keys();
        const auto it = table.find(section + "." + key);
        if (it == table.end()) {
            throw ParseError(line_no, "unknown key '" + key + "' in section [" + section + "]");
        }
        it->second.set(c, value);
    }
    if (run_validation) {
        validate(c);
    }
    return c;
}

/// Canonical text form; parse_config(to_text(c)) reproduces c.
inline std::string to_text(const ExperimentConfig& c)
{
    std::string out;
    std::string current;
    for (const auto& [dotted, key] : detail::keys()) {
        const auto dot = dotted.find('.');
        const std::string section = dotted.substr(0, dot);
        if (section == "region" && !c.region) {
            continue;
        }
        const std::string value = key.get(c);
        if (value.empty()) {
            continue;
        }
        if (section != current) {
            out += (out.empty() ? "[" : "\n[") + section + "]\n";
            current = section;
        }
        out += dotted.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

}  // namespace dysonqsd::cli
