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

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "dysonqsd/stats.hpp"

using namespace dysonqsd;

TEST(Stats, MeanVariance)
{
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    EXPECT_DOUBLE_EQ(stats::mean(x), 2.5);
    EXPECT_DOUBLE_EQ(stats::variance(x), 5.0 / 3.0);
}

TEST(Stats, LinearFitExact)
{
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto f = stats::linear_fit(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-14);
    EXPECT_NEAR(f.intercept, 1.0, 1e-14);
    EXPECT_NEAR(f.r2, 1.0, 1e-14);
}

TEST(Stats, BatchMeansOfConstantSeries)
{
    const std::vector<double> x(100, 3.0);
    const auto b = stats::batch_means(x, 10);
    EXPECT_DOUBLE_EQ(b.mean, 3.0);
    EXPECT_DOUBLE_EQ(b.stderr_, 0.0);
    EXPECT_THROW(stats::batch_means(x, 1), InvalidArgument);
}

TEST(Stats, KsTwoSample)
{
    EXPECT_DOUBLE_EQ(stats::ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}), 0.0);
    EXPECT_DOUBLE_EQ(stats::ks_two_sample({1.0, 2.0}, {3.0, 4.0}), 1.0);
    EXPECT_DOUBLE_EQ(stats::ks_two_sample({1.0, 3.0}, {2.0, 4.0}), 0.5);
    // Censored values never enter the CDFs.
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_DOUBLE_EQ(stats::ks_two_sample({1.0, inf}, {1.0, inf}), 0.0);
    EXPECT_DOUBLE_EQ(stats::ks_two_sample({1.0, inf}, {1.0, 2.0}), 0.5);
}

TEST(Stats, KsAgainstCdf)
{
    std::vector<double> u;
    for (int i = 0; i < 100; ++i) {
        u.push_back((i + 0.5) / 100.0);
    }
    EXPECT_NEAR(stats::ks_against_cdf(u, [](double t) { return t; }), 0.005, 1e-12);
    // Horizon: samples above it are censored but the CDF at the horizon counts.
    EXPECT_NEAR(stats::ks_against_cdf(u, [](double t) { return t; }, 0.5), 0.005, 1e-12);
}

TEST(Stats, WilsonInterval)
{
    const auto i = stats::wilson_interval(0, 100);
    EXPECT_DOUBLE_EQ(i.lo, 0.0);
    EXPECT_GT(i.hi, 0.0);
    const auto j = stats::wilson_interval(50, 100);
    EXPECT_NEAR(j.lo, 0.4038, 1e-3);
    EXPECT_NEAR(j.hi, 0.5962, 1e-3);
    const auto k = stats::wilson_interval(3, 10000);
    EXPECT_GT(k.lo, 0.0);
}

TEST(Stats, IsotonicDecreasing)
{
    const std::vector<double> y{1.0, 0.8, 0.9, 0.5, 0.6, 0.2};
    const auto z = stats::isotonic_decreasing(y);
    ASSERT_EQ(z.size(), y.size());
    for (std::size_t i = 1; i < z.size(); ++i) {
        EXPECT_LE(z[i], z[i - 1]);
    }
    EXPECT_NEAR(z[1], 0.85, 1e-15);
    EXPECT_NEAR(z[2], 0.85, 1e-15);
    EXPECT_NEAR(z[3], 0.55, 1e-15);
    // Already monotone input is left alone.
    const std::vector<double> m{3.0, 2.0, 2.0, 1.0};
    EXPECT_EQ(stats::isotonic_decreasing(m), m);
}
