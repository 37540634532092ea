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
#include <array>
#include <numbers>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "dysonqsd/errors.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/noise.hpp"

namespace dysonqsd {

/// Gap floor used by the 1/gap integrand.
inline constexpr double kInverseGapFloor = 1e-12;

/// max(1e-4 * initial scale, 10 sqrt(dt)).
inline double default_collision_threshold(double initial_scale, double dt)
{
    return std::max(1e-4 * initial_scale, 10.0 * std::sqrt(dt));
}

inline double min_adjacent_gap(std::span<const double> x)
{
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < x.size(); ++i) {
        g = std::min(g, x[i] - x[i - 1]);
    }
    return g;
}

/// Probability that a Bessel bridge of dimension 2 gamma + 1 (unit
/// volatility) between a > 0 and b > 0 over time dt touches 0:
/// 1 - I_mu(z) / I_{-mu}(z), z = a b / dt, mu = |gamma - 1/2|. Zero for
/// gamma >= 1/2.
inline double bessel_bridge_hit_probability(double gamma, double a, double b, double dt)
{
    if (gamma >= 0.5) {
        return 0.0;
    }
    const double z = a * b / dt;
    if (z > 30.0) {
        return 0.0;  // below 2 exp(-60)
    }
    if (z <= 0.0) {
        return 1.0;
    }
    const double mu = 0.5 - gamma;
    const double reflect = 2.0 / std::numbers::pi * std::sin(mu * std::numbers::pi) * boost::math::cyl_bessel_k(mu, z);
    return reflect / (boost::math::cyl_bessel_i(mu, z) + reflect);
}

/// Randomised between-grid-point hit detection for adjacent gaps. The gap of
/// a pair diffuses with variance 2 dt per step, so its Bessel coordinate is
/// gap / sqrt(2).
struct BridgeCorrection {
    double gamma = 0.0;
    double dt = 0.0;
    NoiseStream stream;
};

/// Streaming collision detector. Feed steps k >= 1; step 0 is never tested
/// because the collision time is the first positive time.
class CollisionDetector {
public:
    explicit CollisionDetector(double threshold, std::optional<BridgeCorrection> bridge = std::nullopt)
        : threshold_(threshold), bridge_(std::move(bridge))
    {
        if (!(threshold >= 0.0)) {
            throw InvalidArgument("threshold must be >= 0");
        }
    }

    /// Records the state the next step starts from (needed by the bridge).
    void start(std::span<const double> x0) { prev_.assign(x0.begin(), x0.end()); }

    /// Returns true once a collision has been seen.
    bool observe(std::uint64_t k, std::span<const double> x, bool crossed)
    {
        if (hit_step_) {
            return true;
        }
        if (k >= 1 && (crossed || min_adjacent_gap(x) <= threshold_)) {
            hit_step_ = k;
        }
        else if (k >= 1 && bridge_ && prev_.size() == x.size()) {
            double survive = 1.0;
            for (std::size_t i = 1; i < x.size(); ++i) {
                const double a = (prev_[i] - prev_[i - 1]) / std::numbers::sqrt2;
                const double b = (x[i] - x[i - 1]) / std::numbers::sqrt2;
                survive *= 1.0 - bessel_bridge_hit_probability(bridge_->gamma, a, b, bridge_->dt);
            }
            if (survive < 1.0 && bridge_->stream.uniform(StreamTag::bridge, k, 0) >= survive) {
                hit_step_ = k;
            }
        }
        if (bridge_) {
            prev_.assign(x.begin(), x.end());
        }
        return hit_step_.has_value();
    }

    std::optional<std::uint64_t> hit_step() const { return hit_step_; }

private:
    double threshold_;
    std::optional<BridgeCorrection> bridge_;
    std::vector<double> prev_;
    std::optional<std::uint64_t> hit_step_;
};

/// First grid time t > 0 with an adjacent gap <= threshold or a raw crossing.
/// With `bridge`, a step may also be flagged by the randomised bridge test.
inline std::optional<double> first_collision_time(const Path& path, double threshold,
                                                  std::optional<BridgeCorrection> bridge = std::nullopt)
{
    CollisionDetector det(threshold, std::move(bridge));
    if (path.size() > 0) {
        det.start(path.states.front().values());
    }
    for (std::size_t k = 1; k < path.size(); ++k) {
        if (det.observe(k, path.states[k].values(), path.crossed[k] != 0)) {
            return path.times[k];
        }
    }
    return std::nullopt;
}

struct GapPath {
    std::vector<double> times;
    std::vector<double> gap_sq;
    /// Lower index of the adjacent pair (0-based).
    std::size_t pair_index = 0;
};

inline GapPath gap_path(const Path& path, std::size_t pair)
{
    GapPath g;
    g.pair_index = pair;
    g.times = path.times;
    g.gap_sq.reserve(path.size());
    for (const auto& s : path.states) {
        if (pair + 1 >= s.size()) {
            throw InvalidArgument("pair index out of range");
        }
        const double d = s[pair + 1] - s[pair];
        g.gap_sq.push_back(d * d);
    }
    return g;
}

struct BesqPath {
    std::vector<double> times;
    std::vector<double> values;
};

/// The dominating process dB = 2(2 gamma + 1) dt + 2 sqrt(2 B) dw, with
/// w = (B^{pair+1} - B^{pair}) / sqrt(2) read from the same noise stream as
/// the monitored model path. Euler with full truncation at 0.
inline BesqPath coupled_besq(const NoiseStream& stream, std::size_t n_particles, std::size_t pair, double gamma,
                             double dt, double T, double start)
{
    if (!(start >= 0.0)) {
        throw InvalidArgument("initial squared gap must be >= 0");
    }
    if (pair + 1 >= n_particles) {
        throw InvalidArgument("pair index out of range");
    }
    const std::uint64_t n_steps = step_count(T, dt);
    BesqPath out;
    out.times.reserve(n_steps + 1);
    out.values.reserve(n_steps + 1);
    out.times.push_back(0.0);
    out.values.push_back(start);
    std::vector<double> db(n_particles);
    const double drift = 2.0 * (2.0 * gamma + 1.0) * dt;
    double b = start;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        stream.increments(k, dt, db);
        const double dw = (db[pair + 1] - db[pair]) / std::numbers::sqrt2;
        b = std::max(0.0, b + drift + 2.0 * std::sqrt(2.0 * b) * dw);
        out.times.push_back(static_cast<double>(k + 1) * dt);
        out.values.push_back(b);
    }
    return out;
}

/// Fraction of grid points with gap_sq > besq + margin.
inline double comparison_violation_fraction(const GapPath& gaps, const BesqPath& besq, double margin)
{
    if (gaps.gap_sq.size() != besq.values.size()) {
        throw InvalidArgument("gap and BESQ paths have different lengths");
    }
    std::size_t bad = 0;
    for (std::size_t k = 0; k < gaps.gap_sq.size(); ++k) {
        if (gaps.gap_sq[k] > besq.values[k] + margin) {
            ++bad;
        }
    }
    return static_cast<double>(bad) / static_cast<double>(gaps.gap_sq.size());
}

/// P[T_0 <= t] for a squared Bessel process of dimension delta < 2 started at
/// x0: T_0 has the law of x0 / (2 Z) with Z ~ Gamma((2 - delta) / 2, 1).
inline double besq_hitting_cdf(double delta, double x0, double t)
{
    if (t <= 0.0) {
        return 0.0;
    }
    return boost::math::gamma_q((2.0 - delta) / 2.0, x0 / (2.0 * t));
}

struct BesqOracleOptions {
    /// Samples that have not hit by this time are returned as +infinity.
    double horizon = 20.0;
    std::uint64_t seed = 0;
    /// Local step is min(dt, rel_step * Z): the grid refines as Z nears 0.
    double rel_step = 1e-3;
    /// Reaching hit_fraction * x0 counts as hitting 0. From there the rest of
    /// the time exceeds t with probability of order
    /// (hit_fraction * x0 / t)^((2 - delta) / 2), so the level has to be tiny.
    double hit_fraction = 1e-16;
};

/// One brute-force hitting-time sample of dZ = delta dt + 2 sqrt(Z) dw started
/// at x0 (Euler, truncated at 0), addressed by sample index.
inline double besq_hitting_sample(double delta, double x0, double dt, const BesqOracleOptions& opt,
                                  std::uint64_t sample)
{
    const NoiseStream stream{opt.seed, sample, 1, false};
    const double level = opt.hit_fraction * x0;
    double z = x0;
    double t = 0.0;
    std::array<double, 2> pair{};
    for (std::uint64_t k = 0; t < opt.horizon; ++k) {
        if (k % 2 == 0) {
            pair = stream.gaussian_pair(StreamTag::oracle, k / 2, 0);
        }
        const double h = std::min(dt, opt.rel_step * z);
        z = std::max(0.0, z + delta * h + 2.0 * std::sqrt(z * h) * pair[k % 2]);
        t += h;
        if (z <= level) {
            return t;
        }
    }
    return std::numeric_limits<double>::infinity();
}

/// Brute-force sampler of the first time a squared Bessel process of dimension
/// delta in (0, 2) started at x0 > 0 reaches 0.
template <class Pool>
std::vector<double> besq_hitting_oracle(double delta, double x0, std::size_t n_samples, double dt,
                                        const BesqOracleOptions& opt, Pool& pool)
{
    if (!(delta > 0.0 && delta < 2.0)) {
        throw InvalidArgument("BESQ dimension must lie in (0, 2)");
    }
    if (!(x0 > 0.0)) {
        throw InvalidArgument("BESQ start must be > 0");
    }
    if (!(dt > 0.0)) {
        throw InvalidArgument("dt must be > 0");
    }
    std::vector<double> out(n_samples);
    pool.parallel_for(n_samples, [&](std::size_t i) { out[i] = besq_hitting_sample(delta, x0, dt, opt, i); });
    return out;
}

/// Streaming fraction of states with min adjacent gap < eps.
struct OccupationCounter {
    double eps = 0.0;
    std::uint64_t below = 0;
    std::uint64_t total = 0;

    void observe(std::span<const double> x)
    {
        ++total;
        if (min_adjacent_gap(x) < eps) {
            ++below;
        }
    }
    double fraction() const { return total == 0 ? 0.0 : static_cast<double>(below) / static_cast<double>(total); }
};

inline double boundary_occupation(const Path& path, double eps)
{
    if (!(eps > 0.0)) {
        throw InvalidArgument("eps must be > 0");
    }
    OccupationCounter c{eps};
    for (const auto& s : path.states) {
        c.observe(s.values());
    }
    return c.fraction();
}

/// Left-endpoint Riemann sum of dt / (x^j - x^i), gaps floored at 1e-12.
struct InverseGapAccumulator {
    std::size_t i = 0;
    std::size_t j = 1;
    double dt = 0.0;
    double sum = 0.0;

    /// Call with the state at the left end of each step.
    void observe(std::span<const double> x) { sum += dt / std::max(x[j] - x[i], kInverseGapFloor); }
};

inline double inverse_gap_integral(const Path& path, std::size_t i, std::size_t j)
{
    if (!(i < j) || path.size() == 0 || j >= path.states.front().size()) {
        throw InvalidArgument("need a pair i < j of valid indices");
    }
    InverseGapAccumulator acc{i, j, path.dt};
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
        acc.observe(path.states[k].values());
    }
    return acc.sum;
}

}  // namespace dysonqsd
