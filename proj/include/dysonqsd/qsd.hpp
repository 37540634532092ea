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
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dysonqsd/errors.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/noise.hpp"
#include "dysonqsd/parallel.hpp"
#include "dysonqsd/stats.hpp"

namespace dysonqsd {

/// Open set U_* intersected with the closed chamber.
struct Region {
    enum class Kind { box, gap_cap, half_below };

    Kind kind = Kind::gap_cap;
    std::vector<double> lo;
    std::vector<double> hi;
    /// gap_cap: x^N - x^1 < cap.
    double cap = 1.0;
    /// half_below: x^N < bound.
    double bound = 0.0;

    static Region box(std::vector<double> lo, std::vector<double> hi)
    {
        Region r;
        r.kind = Kind::box;
        r.lo = std::move(lo);
        r.hi = std::move(hi);
        return r;
    }
    static Region gap_cap_of(double L)
    {
        Region r;
        r.kind = Kind::gap_cap;
        r.cap = L;
        return r;
    }
    static Region half_below(double b)
    {
        Region r;
        r.kind = Kind::half_below;
        r.bound = b;
        return r;
    }

    /// `x` is assumed weakly increasing (chamber closure).
    bool contains(std::span<const double> x) const
    {
        switch (kind) {
        case Kind::box:
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (!(x[i] > lo[i] && x[i] < hi[i])) {
                    return false;
                }
            }
            return true;
        case Kind::gap_cap: return x.back() - x.front() < cap;
        case Kind::half_below: return x.back() < bound;
        }
        return false;
    }

    bool contains(const Configuration& x) const { return contains(x.values()); }

    /// Checks the parameters against N and that U meets the closed chamber.
    void validate(std::size_t n_particles) const
    {
        switch (kind) {
        case Kind::box: {
            if (lo.size() != n_particles || hi.size() != n_particles) {
                throw InvalidArgument("box bounds must have n_particles entries");
            }
            // A weakly increasing point exists iff the running max of lo
            // stays below every hi.
            double run = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n_particles; ++i) {
                if (!(lo[i] < hi[i])) {
                    throw InvalidArgument("box needs lo < hi in every coordinate");
                }
                run = std::max(run, lo[i]);
                if (!(run < hi[i])) {
                    throw InvalidArgument("box does not meet the chamber");
                }
            }
            return;
        }
        case Kind::gap_cap:
            if (!(cap > 0.0) || !std::isfinite(cap)) {
                throw InvalidArgument("gap_cap L must be finite and > 0");
            }
            return;
        case Kind::half_below:
            if (!std::isfinite(bound)) {
                throw InvalidArgument("half_below bound must be finite");
            }
            return;
        }
    }
};

inline bool region_contains(const Region& r, const Configuration& x) { return r.contains(x); }

/// First grid time whose state lies outside U.
inline std::optional<double> exit_time(const Path& path, const Region& r)
{
    for (std::size_t k = 0; k < path.size(); ++k) {
        if (!r.contains(path.states[k])) {
            return path.times[k];
        }
    }
    return std::nullopt;
}

/// Weighted configurations; weights sum to 1.
struct SampleMeasure {
    std::vector<Configuration> samples;
    std::vector<double> weights;

    SampleMeasure() = default;
    explicit SampleMeasure(std::vector<Configuration> xs) : samples(std::move(xs))
    {
        if (samples.empty()) {
            throw InvalidArgument("empty sample measure");
        }
        weights.assign(samples.size(), 1.0 / static_cast<double>(samples.size()));
        build_cumulative();
    }
    SampleMeasure(std::vector<Configuration> xs, std::vector<double> w) : samples(std::move(xs)), weights(std::move(w))
    {
        if (samples.empty() || samples.size() != weights.size()) {
            throw InvalidArgument("sample measure needs one weight per sample");
        }
        double total = 0.0;
        for (double v : weights) {
            if (!(v > 0.0)) {
                throw InvalidArgument("sample weights must be > 0");
            }
            total += v;
        }
        for (double& v : weights) {
            v /= total;
        }
        build_cumulative();
    }

    static SampleMeasure point(const Configuration& x) { return SampleMeasure(std::vector<Configuration>{x}); }

    std::size_t size() const { return samples.size(); }

    /// Draw number `i` from (seed, draw stream): inverse CDF on the weights.
    const Configuration& draw(const NoiseStream& stream, std::uint64_t i) const
    {
        if (samples.size() == 1) {
            return samples.front();
        }
        const double u = stream.uniform(StreamTag::draw, i, 0);
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return samples[std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), samples.size() - 1)];
    }

private:
    void build_cumulative()
    {
        cumulative_.resize(weights.size());
        std::partial_sum(weights.begin(), weights.end(), cumulative_.begin());
    }

    std::vector<double> cumulative_;
};

/// 1-D summary of a configuration.
struct Statistic {
    enum class Kind { min_gap, coordinate, center_of_mass };
    Kind kind = Kind::min_gap;
    std::size_t index = 0;

    static Statistic min_gap() { return {Kind::min_gap, 0}; }
    static Statistic coordinate(std::size_t k) { return {Kind::coordinate, k}; }
    static Statistic center_of_mass() { return {Kind::center_of_mass, 0}; }

    double operator()(std::span<const double> x) const
    {
        switch (kind) {
        case Kind::min_gap: {
            if (x.size() < 2) {
                throw InvalidArgument("min_gap needs at least two particles");
            }
            double g = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < x.size(); ++i) {
                g = std::min(g, x[i] - x[i - 1]);
            }
            return g;
        }
        case Kind::coordinate:
            if (index >= x.size()) {
                throw InvalidArgument("coordinate index out of range");
            }
            return x[index];
        case Kind::center_of_mass: return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        }
        return 0.0;
    }

    std::string name() const
    {
        switch (kind) {
        case Kind::min_gap: return "min_gap";
        case Kind::coordinate: return "x" + std::to_string(index + 1);
        case Kind::center_of_mass: return "center_of_mass";
        }
        return "?";
    }

    friend bool operator==(const Statistic&, const Statistic&) = default;
};

/// Equal-width bins on [lo, hi]; values outside are clamped into the end bins.
struct Binning {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n_bins = 10;

    void validate() const
    {
        if (!(lo < hi) || n_bins == 0) {
            throw InvalidArgument("binning needs lo < hi and n_bins > 0");
        }
    }
    double width() const { return (hi - lo) / static_cast<double>(n_bins); }
    double edge(std::size_t i) const { return lo + width() * static_cast<double>(i); }
    std::size_t index(double v) const
    {
        if (!(v > lo)) {
            return 0;
        }
        const auto i = static_cast<std::size_t>((v - lo) / width());
        return std::min(i, n_bins - 1);
    }

    friend bool operator==(const Binning&, const Binning&) = default;
};

struct Histogram {
    Statistic statistic;
    Binning binning;
    std::vector<double> mass;

    double max_mass() const { return mass.empty() ? 0.0 : *std::max_element(mass.begin(), mass.end()); }
};

/// Accumulates weighted values, then normalizes.
class HistogramBuilder {
public:
    HistogramBuilder(Statistic s, Binning b) : stat_(s), bin_(b), counts_(b.n_bins, 0.0) { b.validate(); }

    void add(std::span<const double> x, double w = 1.0)
    {
        counts_[bin_.index(stat_(x))] += w;
        total_ += w;
    }
    double total() const { return total_; }

    Histogram finish() const
    {
        if (!(total_ > 0.0)) {
            throw NoSurvivors("histogram has no mass");
        }
        Histogram h{stat_, bin_, counts_};
        for (double& m : h.mass) {
            m /= total_;
        }
        return h;
    }

private:
    Statistic stat_;
    Binning bin_;
    std::vector<double> counts_;
    double total_ = 0.0;
};

inline Histogram histogram(const SampleMeasure& m, Statistic s, Binning b)
{
    HistogramBuilder hb(s, b);
    for (std::size_t i = 0; i < m.size(); ++i) {
        hb.add(m.samples[i].values(), m.weights[i]);
    }
    return hb.finish();
}

/// Half the L1 distance between bin masses.
inline double tv_distance(const Histogram& a, const Histogram& b)
{
    if (!(a.binning == b.binning) || !(a.statistic == b.statistic) || a.mass.size() != b.mass.size()) {
        throw BinningMismatch("histograms use different statistics or binnings");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.mass.size(); ++i) {
        s += std::abs(a.mass[i] - b.mass[i]);
    }
    return std::min(1.0, 0.5 * s);
}

/// Options shared by the killed-path Monte Carlo routines.
struct KilledRunOptions {
    std::size_t n_paths = 1000;
    std::uint64_t seed = 0;
    /// Paths use noise streams first_path, first_path + 1, ...
    std::uint64_t first_path = 0;
    bool zero_noise = false;

    NoiseStream stream(std::uint64_t i) const { return NoiseStream{seed, first_path + i, 1, zero_noise}; }
};

namespace detail {

inline std::vector<Stepper> make_steppers(std::size_t n, const ModelParams& p, const SchemeConfig& cfg)
{
    std::vector<Stepper> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(p, cfg);
    }
    return out;
}

inline void check_start(const SampleMeasure& nu, const Region& r, const ModelParams& p)
{
    p.validate();
    r.validate(p.n_particles);
    for (const auto& x : nu.samples) {
        if (x.size() != p.n_particles) {
            throw InvalidArgument("initial configuration size does not match n_particles");
        }
        if (!r.contains(x)) {
            throw InvalidArgument("initial law must be supported in the region");
        }
    }
}

}  // namespace detail

struct SurvivalCurve {
    std::vector<double> times;
    /// Isotonic (weakly decreasing) estimate.
    std::vector<double> survival;
    std::vector<double> raw;
    std::vector<double> stderr_;
    std::size_t n_paths = 0;
    /// Paths still inside U at the last time.
    std::size_t n_alive = 0;
};

/// Exit step of every path (n_steps + 1 when it never exits); step 0 is the start.
inline std::vector<std::uint64_t> exit_steps(const SampleMeasure& nu, const Region& r, double T, const SchemeConfig& cfg,
                                            const ModelParams& p, const KilledRunOptions& opt, WorkerPool& pool)
{
    detail::check_start(nu, r, p);
    const std::uint64_t n_steps = step_count(T, cfg.dt);
    auto steppers = detail::make_steppers(pool.size(), p, cfg);
    std::vector<std::uint64_t> out(opt.n_paths, n_steps + 1);
    pool.parallel_for_worker(opt.n_paths, [&](std::size_t i, std::size_t w) {
        const NoiseStream s = opt.stream(i);
        const Configuration& x0 = nu.draw(s, 0);
        run_path(x0.values(), n_steps, steppers[w], s, [&](std::uint64_t k, std::span<const double> x, bool) {
            if (!r.contains(x)) {
                out[i] = k;
                return false;
            }
            return true;
        });
    });
    return out;
}

/// P_nu[t < sigma_U] on the grid t = j * record_every * dt.
inline SurvivalCurve survival_curve(const SampleMeasure& nu, const Region& r, double T, const SchemeConfig& cfg,
                                    const ModelParams& p, const KilledRunOptions& opt, WorkerPool& pool,
                                    std::uint64_t record_every = 100)
{
    if (opt.n_paths == 0 || record_every == 0) {
        throw InvalidArgument("need n_paths > 0 and record_every > 0");
    }
    const std::uint64_t n_steps = step_count(T, cfg.dt);
    const auto exits = exit_steps(nu, r, T, cfg, p, opt, pool);
    std::vector<std::uint64_t> sorted = exits;
    std::sort(sorted.begin(), sorted.end());
    SurvivalCurve c;
    c.n_paths = opt.n_paths;
    const double n = static_cast<double>(opt.n_paths);
    for (std::uint64_t k = 0;; k = std::min(n_steps, k + record_every)) {
        const auto dead = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), k) - sorted.begin());
        const double s = (n - dead) / n;
        c.times.push_back(static_cast<double>(k) * cfg.dt);
        c.raw.push_back(s);
        c.stderr_.push_back(std::sqrt(s * (1.0 - s) / n));
        if (k == n_steps) {
            c.n_alive = static_cast<std::size_t>(n - dead);
            break;
        }
    }
    c.survival = stats::isotonic_decreasing(c.raw);
    return c;
}

inline SurvivalCurve survival_curve(const Configuration& x0, const Region& r, double T, const SchemeConfig& cfg,
                                    const ModelParams& p, const KilledRunOptions& opt, WorkerPool& pool,
                                    std::uint64_t record_every = 100)
{
    return survival_curve(SampleMeasure::point(x0), r, T, cfg, p, opt, pool, record_every);
}

struct LambdaFit {
    double lambda = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

/// Least-squares slope of -log(survival) on [t0, t1].
inline LambdaFit estimate_lambda(const SurvivalCurve& c, double t0, double t1)
{
    std::vector<double> t;
    std::vector<double> y;
    for (std::size_t i = 0; i < c.times.size(); ++i) {
        if (c.times[i] >= t0 && c.times[i] <= t1 && c.survival[i] > 0.0) {
            t.push_back(c.times[i]);
            y.push_back(-std::log(c.survival[i]));
        }
    }
    if (t.size() < 3) {
        throw InsufficientSurvivors("fewer than 3 curve points with survivors in the fit window");
    }
    const auto fit = stats::linear_fit(t, y);
    return {fit.slope, fit.r2, t.size()};
}

/// Survivors of nu P_t^U and how many paths produced them.
struct ConditionedSample {
    SampleMeasure survivors;
    std::size_t n_paths = 0;
    std::size_t n_survived = 0;
};

/// Runs n_paths from nu up to each time in `times` (increasing, multiples of
/// dt) and returns the survivors at each of them.
inline std::vector<ConditionedSample> conditioned_samples(const SampleMeasure& nu, const Region& r,
                                                          std::span<const double> times, const SchemeConfig& cfg,
                                                          const ModelParams& p, const KilledRunOptions& opt,
                                                          WorkerPool& pool)
{
    detail::check_start(nu, r, p);
    if (times.empty() || !std::is_sorted(times.begin(), times.end())) {
        throw InvalidArgument("times must be non-empty and increasing");
    }
    std::vector<std::uint64_t> marks;
    for (double t : times) {
        marks.push_back(step_count(t, cfg.dt));
    }
    const std::size_t n_marks = marks.size();
    auto steppers = detail::make_steppers(pool.size(), p, cfg);
    // states[i * n_marks + m]; empty when path i is dead at mark m.
    std::vector<std::vector<double>> states(opt.n_paths * n_marks);
    pool.parallel_for_worker(opt.n_paths, [&](std::size_t i, std::size_t w) {
        const NoiseStream s = opt.stream(i);
        const Configuration& x0 = nu.draw(s, 0);
        std::size_t m = 0;
        while (m < n_marks && marks[m] == 0) {
            states[i * n_marks + m++] = x0.vector();
        }
        if (m == n_marks) {
            return;
        }
        run_path(x0.values(), marks.back(), steppers[w], s, [&](std::uint64_t k, std::span<const double> x, bool) {
            if (!r.contains(x)) {
                return false;
            }
            while (m < n_marks && marks[m] == k) {
                states[i * n_marks + m++].assign(x.begin(), x.end());
            }
            return m < n_marks;
        });
    });
    std::vector<ConditionedSample> out;
    for (std::size_t m = 0; m < n_marks; ++m) {
        std::vector<Configuration> alive;
        for (std::size_t i = 0; i < opt.n_paths; ++i) {
            auto& st = states[i * n_marks + m];
            if (!st.empty()) {
                alive.emplace_back(std::move(st));
            }
        }
        ConditionedSample cs;
        cs.n_paths = opt.n_paths;
        cs.n_survived = alive.size();
        if (!alive.empty()) {
            cs.survivors = SampleMeasure(std::move(alive));
        }
        out.push_back(std::move(cs));
    }
    return out;
}

/// Histogram of `stat` under nu Q_t^U.
inline Histogram conditioned_distribution(const SampleMeasure& nu, const Region& r, double t, Statistic stat,
                                          Binning bins, const SchemeConfig& cfg, const ModelParams& p,
                                          const KilledRunOptions& opt, WorkerPool& pool)
{
    const double times[] = {t};
    auto cs = conditioned_samples(nu, r, times, cfg, p, opt, pool);
    if (cs.front().n_survived == 0) {
        throw NoSurvivors("no path survived to t = " + std::to_string(t));
    }
    return histogram(cs.front().survivors, stat, bins);
}

/// TV between two histograms with a bootstrap standard error.
struct TvEstimate {
    double tv = 0.0;
    double stderr_ = 0.0;
};

/// Resamples both (equal-weight) survivor sets `n_boot` times, draw stream of `seed`.
inline TvEstimate tv_with_bootstrap(const SampleMeasure& a, const SampleMeasure& b, Statistic s, Binning bins,
                                    std::size_t n_boot, std::uint64_t seed)
{
    TvEstimate out;
    out.tv = tv_distance(histogram(a, s, bins), histogram(b, s, bins));
    if (n_boot < 2) {
        return out;
    }
    std::vector<std::size_t> ia(a.size());
    std::vector<std::size_t> ib(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ia[i] = bins.index(s(a.samples[i].values()));
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        ib[i] = bins.index(s(b.samples[i].values()));
    }
    std::vector<double> reps;
    for (std::size_t r = 0; r < n_boot; ++r) {
        std::vector<double> ma(bins.n_bins, 0.0);
        std::vector<double> mb(bins.n_bins, 0.0);
        const NoiseStream sa{seed, 2 * r, 1, false};
        const NoiseStream sb{seed, 2 * r + 1, 1, false};
        for (std::size_t i = 0; i < a.size(); ++i) {
            ma[ia[sa.uniform_index(StreamTag::draw, i, 0, a.size())]] += 1.0 / static_cast<double>(a.size());
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            mb[ib[sb.uniform_index(StreamTag::draw, i, 0, b.size())]] += 1.0 / static_cast<double>(b.size());
        }
        double d = 0.0;
        for (std::size_t k = 0; k < bins.n_bins; ++k) {
            d += std::abs(ma[k] - mb[k]);
        }
        reps.push_back(0.5 * d);
    }
    out.stderr_ = std::sqrt(stats::variance(reps));
    return out;
}

/// Fleming-Viot particle system.
struct FVEnsemble {
    std::vector<std::vector<double>> particles;
    std::uint64_t generation = 0;
    std::uint64_t resample_count = 0;

    std::size_t size() const { return particles.size(); }
};

/// Propagation and resampling with per-worker scratch.
class FleetStepper {
public:
    FleetStepper(const ModelParams& p, const SchemeConfig& cfg, const Region& r, std::uint64_t seed,
                 bool zero_noise, WorkerPool& pool)
        : region_(r), seed_(seed), zero_noise_(zero_noise), pool_(pool),
          steppers_(detail::make_steppers(pool.size(), p, cfg)), noise_(pool.size(), std::vector<double>(p.n_particles))
    {
        r.validate(p.n_particles);
    }

    /// One FV step. Exits are handled in particle order; each exited particle
    /// copies the post-step state of a uniformly chosen particle that did not
    /// exit in this step.
    void step(FVEnsemble& e)
    {
        const std::size_t m = e.size();
        if (m < 2) {
            throw InvalidArgument("Fleming-Viot ensemble needs M >= 2");
        }
        alive_.assign(m, 1);
        const double dt = steppers_.front().config().dt;
        pool_.parallel_for_worker(m, [&](std::size_t i, std::size_t w) {
            const NoiseStream s{seed_, i, 1, zero_noise_};
            s.increments(e.generation, dt, noise_[w]);
            steppers_[w].advance(e.particles[i], noise_[w]);
            alive_[i] = region_.contains(e.particles[i]) ? 1 : 0;
        });
        survivors_.clear();
        for (std::size_t i = 0; i < m; ++i) {
            if (alive_[i]) {
                survivors_.push_back(i);
            }
        }
        if (survivors_.empty()) {
            throw EnsembleExtinct("all " + std::to_string(m) + " particles exited at generation " +
                                  std::to_string(e.generation + 1));
        }
        const NoiseStream rs{seed_, 0, 1, false};
        for (std::size_t i = 0; i < m; ++i) {
            if (!alive_[i]) {
                const auto pick = rs.uniform_index(StreamTag::resample, e.generation, static_cast<std::uint32_t>(i),
                                                   survivors_.size());
                e.particles[i] = e.particles[survivors_[pick]];
                ++e.resample_count;
            }
        }
        ++e.generation;
    }

private:
    Region region_;
    std::uint64_t seed_;
    bool zero_noise_;
    WorkerPool& pool_;
    std::vector<Stepper> steppers_;
    std::vector<std::vector<double>> noise_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::size_t> survivors_;
};

inline FVEnsemble make_ensemble(const SampleMeasure& init, std::size_t m, std::uint64_t seed)
{
    FVEnsemble e;
    const NoiseStream s{seed, 0, 1, false};
    e.particles.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        e.particles.push_back(init.draw(s.with_path(i), 1).vector());
    }
    return e;
}

/// Value-in value-out single step.
inline FVEnsemble fv_step(FVEnsemble e, const Region& r, const SchemeConfig& cfg, const ModelParams& p,
                          std::uint64_t seed, WorkerPool& pool, bool zero_noise = false)
{
    FleetStepper fs(p, cfg, r, seed, zero_noise, pool);
    fs.step(e);
    return e;
}

struct FVOptions {
    std::size_t m = 1000;
    double t_burn = 5.0;
    double t_avg = 20.0;
    std::uint64_t seed = 0;
    /// Snapshot spacing in steps during averaging.
    std::uint64_t snapshot_every = 1000;
    bool zero_noise = false;
};

struct FVResult {
    /// Pooled post-burn-in snapshots, equal weights.
    SampleMeasure estimate;
    /// Resamples per particle per unit time during averaging.
    double lambda = 0.0;
    std::uint64_t resamples = 0;
    FVEnsemble final_state;
};

inline FVResult fv_run(const SampleMeasure& init, const Region& r, const SchemeConfig& cfg, const ModelParams& p,
                       const FVOptions& opt, WorkerPool& pool)
{
    if (opt.m < 2 || !(opt.t_burn > 0.0) || !(opt.t_avg > 0.0) || opt.snapshot_every == 0) {
        throw InvalidArgument("fv_run needs M >= 2, T_burn > 0, T_avg > 0, snapshot_every > 0");
    }
    detail::check_start(init, r, p);
    const std::uint64_t n_burn = step_count(opt.t_burn, cfg.dt);
    const std::uint64_t n_avg = step_count(opt.t_avg, cfg.dt);
    FleetStepper fs(p, cfg, r, opt.seed, opt.zero_noise, pool);
    FVEnsemble e = make_ensemble(init, opt.m, opt.seed);
    for (std::uint64_t k = 0; k < n_burn; ++k) {
        fs.step(e);
    }
    const std::uint64_t before = e.resample_count;
    std::vector<Configuration> snaps;
    for (std::uint64_t k = 1; k <= n_avg; ++k) {
        fs.step(e);
        if (k % opt.snapshot_every == 0) {
            for (const auto& x : e.particles) {
                snaps.emplace_back(x);
            }
        }
    }
    if (snaps.empty()) {
        for (const auto& x : e.particles) {
            snaps.emplace_back(x);
        }
    }
    FVResult out;
    out.resamples = e.resample_count - before;
    out.lambda = static_cast<double>(out.resamples) / (static_cast<double>(opt.m) * opt.t_avg);
    out.estimate = SampleMeasure(std::move(snaps));
    out.final_state = std::move(e);
    return out;
}

}  // namespace dysonqsd
