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

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "dysonqsd/collision.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/parallel.hpp"
#include "dysonqsd/stats.hpp"

using namespace dysonqsd;

namespace {

Path constant_path(const Configuration& x, double dt, std::size_t steps)
{
    Path p;
    p.dt = dt;
    for (std::size_t k = 0; k <= steps; ++k) {
        p.times.push_back(static_cast<double>(k) * dt);
        p.states.push_back(x);
        p.crossed.push_back(0);
    }
    return p;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

}  // namespace

TEST(FirstCollision, NoneWhenFarApart)
{
    EXPECT_FALSE(first_collision_time(constant_path(Configuration{0.0, 5.0}, 0.01, 100), 1e-6).has_value());
}

TEST(FirstCollision, StepZeroIsNeverTested)
{
    Path p = constant_path(Configuration{0.0, 1.0}, 0.01, 3);
    p.states[0] = Configuration{0.0, 0.0};
    EXPECT_FALSE(first_collision_time(p, 1e-6).has_value());
    p.states[2] = Configuration{0.5, 0.5};
    EXPECT_DOUBLE_EQ(*first_collision_time(p, 1e-6), 0.02);
}

TEST(FirstCollision, CrossingFlagCounts)
{
    Path p = constant_path(Configuration{0.0, 1.0}, 0.01, 5);
    p.crossed[4] = 1;
    EXPECT_DOUBLE_EQ(*first_collision_time(p, 1e-6), 0.04);
}

TEST(FirstCollision, ThresholdBoundaryInclusive)
{
    Path p = constant_path(Configuration{0.0, 1.0}, 0.5, 2);
    p.states[2] = Configuration{0.0, 0.25};
    EXPECT_DOUBLE_EQ(*first_collision_time(p, 0.25), 1.0);
    EXPECT_FALSE(first_collision_time(p, 0.2).has_value());
    EXPECT_THROW(first_collision_time(p, -1.0), InvalidArgument);
}

TEST(FirstCollision, DefaultThreshold)
{
    EXPECT_DOUBLE_EQ(default_collision_threshold(1.0, 1e-4), 0.1);
    EXPECT_DOUBLE_EQ(default_collision_threshold(1e4, 1e-10), 1.0);
}

// For gamma = 0 the Bessel process of dimension 1 is |W|; its bridge mixes the
// W-bridges to +b and -b, giving 2 e^{-2z} / (1 + e^{-2z}).
TEST(BridgeHit, ReflectedBrownianClosedForm)
{
    for (double a : {0.01, 0.1, 0.5}) {
        for (double b : {0.02, 0.1, 0.3}) {
            const double dt = 0.01;
            const double z = a * b / dt;
            const double expected = 2.0 * std::exp(-2.0 * z) / (1.0 + std::exp(-2.0 * z));
            EXPECT_NEAR(bessel_bridge_hit_probability(0.0, a, b, dt), expected, 1e-12) << a << " " << b;
        }
    }
}

TEST(BridgeHit, RangeAndMonotonicity)
{
    EXPECT_EQ(bessel_bridge_hit_probability(0.5, 0.01, 0.01, 1.0), 0.0);
    EXPECT_EQ(bessel_bridge_hit_probability(0.75, 0.01, 0.01, 1.0), 0.0);
    EXPECT_EQ(bessel_bridge_hit_probability(0.25, 0.0, 0.3, 1.0), 1.0);
    double prev = 1.0;
    for (double b = 0.01; b < 1.0; b += 0.05) {
        const double p = bessel_bridge_hit_probability(0.25, 0.1, b, 0.01);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, prev);
        prev = p;
    }
    // Larger gamma (stronger repulsion) hits less often.
    EXPECT_GT(bessel_bridge_hit_probability(0.1, 0.1, 0.1, 0.01), bessel_bridge_hit_probability(0.4, 0.1, 0.1, 0.01));
}

// gamma = 0.25: with the bridge test a coarse grid flags about as many paths as
// a grid 100x finer sharing the same Brownian path.
TEST(BridgeHit, DetectorMatchesFineGridHits)
{
    const ModelParams p{2, 0.25, VSpec::zero()};
    SchemeConfig fine;
    fine.scheme = Scheme::sorted_tamed_explicit;
    fine.dt = 1e-5;
    SchemeConfig coarse = fine;
    coarse.dt = 1e-3;
    const int n = 400;
    std::vector<double> t_fine, t_coarse;
    for (int i = 0; i < n; ++i) {
        const NoiseStream sf{41, static_cast<std::uint64_t>(i), 1, false};
        const NoiseStream sc{41, static_cast<std::uint64_t>(i), 100, false};
        const auto pf = simulate_path(Configuration{0.0, 0.3}, 0.2, fine, p, sf);
        const auto pc = simulate_path(Configuration{0.0, 0.3}, 0.2, coarse, p, sc);
        t_fine.push_back(first_collision_time(pf, 1e-4).value_or(std::numeric_limits<double>::infinity()));
        t_coarse.push_back(first_collision_time(pc, 1e-4, BridgeCorrection{0.25, coarse.dt, sc})
                               .value_or(std::numeric_limits<double>::infinity()));
    }
    auto hit_fraction = [](const std::vector<double>& v) {
        return static_cast<double>(std::count_if(v.begin(), v.end(), [](double t) { return std::isfinite(t); })) /
               static_cast<double>(v.size());
    };
    // Without the bridge the coarse grid misses a visible share of hits.
    std::vector<double> t_plain;
    for (int i = 0; i < n; ++i) {
        const NoiseStream sc{41, static_cast<std::uint64_t>(i), 100, false};
        t_plain.push_back(first_collision_time(simulate_path(Configuration{0.0, 0.3}, 0.2, coarse, p, sc), 1e-4)
                              .value_or(std::numeric_limits<double>::infinity()));
    }
    const double f = hit_fraction(t_fine);
    EXPECT_NEAR(hit_fraction(t_coarse), f, 0.05);
    EXPECT_LT(hit_fraction(t_plain), hit_fraction(t_coarse));
}

TEST(Detector, BridgeDeterministic)
{
    const ModelParams p{3, 0.25, VSpec::quadratic(0.5)};
    SchemeConfig c;
    c.dt = 1e-3;
    const NoiseStream s{5, 2, 1, false};
    const auto path = simulate_path(Configuration{-0.1, 0.0, 0.1}, 1.0, c, p, s);
    const auto a = first_collision_time(path, 1e-8, BridgeCorrection{0.25, c.dt, s});
    const auto b = first_collision_time(path, 1e-8, BridgeCorrection{0.25, c.dt, s});
    EXPECT_EQ(a, b);
}

TEST(CoupledBesq, ZeroNoiseIsLinearDrift)
{
    const NoiseStream s{1, 0, 1, true};
    const auto b = coupled_besq(s, 2, 0, 0.25, 1e-3, 1.0, 0.0);
    ASSERT_EQ(b.values.size(), 1001u);
    for (std::size_t k = 0; k < b.values.size(); ++k) {
        EXPECT_NEAR(b.values[k], 3.0 * b.times[k], 1e-12);
    }
    EXPECT_THROW(coupled_besq(s, 2, 1, 0.25, 1e-3, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(coupled_besq(s, 2, 0, 0.25, 1e-3, 1.0, -1.0), InvalidArgument);
}

TEST(CoupledBesq, DominatesGapSquared)
{
    const ModelParams p{3, 0.25, VSpec::quadratic(0.5)};
    SchemeConfig c;
    c.dt = 1e-3;
    const double margin = 5.0 * std::sqrt(c.dt);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 10; ++i) {
        const NoiseStream s{13, i, 1, false};
        const auto path = simulate_path(Configuration{-0.5, 0.0, 0.5}, 2.0, c, p, s);
        for (std::size_t pair = 0; pair < 2; ++pair) {
            const auto g = gap_path(path, pair);
            const auto b = coupled_besq(s, 3, pair, 0.25, c.dt, 2.0, g.gap_sq.front());
            worst = std::max(worst, comparison_violation_fraction(g, b, margin));
        }
    }
    EXPECT_LT(worst, 0.01);
}

TEST(CoupledBesq, ViolationFractionExamples)
{
    GapPath g{{0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0}, 0};
    BesqPath b{{0.0, 1.0, 2.0, 3.0}, {0.0, 2.0, 1.0, 3.0}};
    EXPECT_DOUBLE_EQ(comparison_violation_fraction(g, b, 0.0), 0.25);
    EXPECT_DOUBLE_EQ(comparison_violation_fraction(g, b, 1.0), 0.0);
}

// delta = 1: BESQ(1) is W^2, so P[T_0 <= t] = erfc(sqrt(x0 / (2t))).
TEST(BesqCdf, DimensionOneIsBrownian)
{
    for (double t : {0.1, 0.5, 1.0, 4.0}) {
        for (double x0 : {0.5, 1.0, 2.0}) {
            EXPECT_NEAR(besq_hitting_cdf(1.0, x0, t), std::erfc(std::sqrt(x0 / (2.0 * t))), 1e-14);
        }
    }
    EXPECT_EQ(besq_hitting_cdf(1.5, 1.0, 0.0), 0.0);
    EXPECT_NEAR(besq_hitting_cdf(1.5, 1.0, 1e12), 1.0, 1e-2);
}

TEST(BesqOracle, MatchesClosedForm)
{
    WorkerPool pool(1);
    BesqOracleOptions opt;
    opt.seed = 3;
    const std::size_t n = 2000;
    const auto s = besq_hitting_oracle(1.5, 1.0, n, 1e-2, opt, pool);
    const double ks = stats::ks_against_cdf(s, [](double t) { return besq_hitting_cdf(1.5, 1.0, t); }, opt.horizon);
    EXPECT_LT(ks, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(BesqOracle, ScalingInStart)
{
    WorkerPool pool(1);
    BesqOracleOptions one;
    one.seed = 4;
    BesqOracleOptions four = one;
    four.seed = 5;
    four.horizon = 4.0 * one.horizon;
    const std::size_t n = 10000;
    auto a = besq_hitting_oracle(1.5, 1.0, n, 1e-2, one, pool);
    auto b = besq_hitting_oracle(1.5, 4.0, n, 4e-2, four, pool);
    for (double& t : b) {
        t /= 4.0;
    }
    EXPECT_LT(stats::ks_two_sample(a, b), 0.02);
}

TEST(BesqOracle, MedianGrowsTowardDimensionTwo)
{
    WorkerPool pool(1);
    BesqOracleOptions opt;
    opt.seed = 6;
    double prev = 0.0;
    for (double delta : {0.5, 1.0, 1.5, 1.9}) {
        const double m = median(besq_hitting_oracle(delta, 1.0, 400, 1e-2, opt, pool));
        EXPECT_GT(m, prev) << delta;
        prev = m;
    }
}

TEST(BesqOracle, RejectsBadArguments)
{
    WorkerPool pool(1);
    EXPECT_THROW(besq_hitting_oracle(2.0, 1.0, 1, 1e-2, BesqOracleOptions{}, pool), InvalidArgument);
    EXPECT_THROW(besq_hitting_oracle(1.5, 0.0, 1, 1e-2, BesqOracleOptions{}, pool), InvalidArgument);
}

TEST(Occupation, Examples)
{
    const Path p = constant_path(Configuration{0.0, 1.0, 3.0}, 0.01, 10);
    EXPECT_EQ(boundary_occupation(p, 0.5), 0.0);
    EXPECT_EQ(boundary_occupation(p, 1e300), 1.0);
    EXPECT_THROW(boundary_occupation(p, 0.0), InvalidArgument);
}

TEST(Occupation, MonotoneInEps)
{
    const ModelParams p{2, 0.25, VSpec::quadratic(0.5)};
    SchemeConfig c;
    c.dt = 1e-3;
    const auto path = simulate_path(Configuration{0.0, 0.1}, 5.0, c, p, NoiseStream{9, 0, 1, false});
    double prev = 0.0;
    for (double eps : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
        const double o = boundary_occupation(path, eps);
        EXPECT_GE(o, prev);
        prev = o;
    }
}

TEST(InverseGap, Examples)
{
    EXPECT_NEAR(inverse_gap_integral(constant_path(Configuration{0.0, 2.0}, 0.01, 100), 0, 1), 0.5, 1e-12);
    EXPECT_LE(inverse_gap_integral(constant_path(Configuration{0.0, 1.0, 2.5}, 0.01, 100), 0, 2), 1.0);
    EXPECT_THROW(inverse_gap_integral(constant_path(Configuration{0.0, 1.0}, 0.01, 1), 1, 1), InvalidArgument);
    // A tie is floored instead of dividing by zero.
    EXPECT_TRUE(std::isfinite(inverse_gap_integral(constant_path(Configuration{0.0, 0.0}, 0.01, 1), 0, 1)));
}
