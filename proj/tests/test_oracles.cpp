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
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/hypergeometric_1F1.hpp>
#include <boost/math/tools/roots.hpp>
#include <gtest/gtest.h>

#include "dysonqsd/oracles.hpp"

using namespace dysonqsd;

namespace {

// Even Dirichlet eigenvalue of 1/2 f'' - 2 a x f' on (-r, r): with y = sqrt(2a) x the
// equation is Hermite's with index lambda / (2a); its even solution is
// 1F1(-lambda / (4a); 1/2; y^2), so lambda is the first root in lambda.
double hermite_dirichlet_lambda(double a, double r)
{
    auto f = [&](double lam) { return boost::math::hypergeometric_1F1(-lam / (4.0 * a), 0.5, 2.0 * a * r * r); };
    std::uintmax_t it = 200;
    const auto root = boost::math::tools::toms748_solve(f, 0.05, 3.0, boost::math::tools::eps_tolerance<double>(50), it);
    return 0.5 * (root.first + root.second);
}

}  // namespace

TEST(OuOracle, BrownianSineMode)
{
    const auto o = ou_killed_oracle(0.0, std::numbers::pi, 0.0, 2000);
    EXPECT_NEAR(o.lambda, 0.5, 1e-6);
    ASSERT_EQ(o.x.size(), 2002u);
    for (std::size_t i = 0; i < o.x.size(); ++i) {
        EXPECT_NEAR(o.phi[i], std::sin(o.x[i]), 1e-5);
    }
}

TEST(OuOracle, SecondOrderRefinement)
{
    const double e1 = std::abs(ou_killed_oracle(0.0, std::numbers::pi, 0.0, 249).lambda - 0.5);
    const double e2 = std::abs(ou_killed_oracle(0.0, std::numbers::pi, 0.0, 499).lambda - 0.5);
    EXPECT_NEAR(e1 / e2, 4.0, 0.1);
    const double l1 = ou_killed_oracle(-1.0, 1.0, 0.5, 249).lambda;
    const double l2 = ou_killed_oracle(-1.0, 1.0, 0.5, 499).lambda;
    const double l3 = ou_killed_oracle(-1.0, 1.0, 0.5, 999).lambda;
    EXPECT_NEAR(std::abs(l1 - l2) / std::abs(l2 - l3), 4.0, 0.2);
}

TEST(OuOracle, MatchesHypergeometricRoot)
{
    for (double a : {0.25, 0.5, 1.0}) {
        const double exact = hermite_dirichlet_lambda(a, 1.0);
        EXPECT_NEAR(ou_killed_oracle(-1.0, 1.0, a, 4000).lambda, exact, 1e-5 * exact) << a;
    }
    EXPECT_NEAR(hermite_dirichlet_lambda(0.5, 1.0), 0.79846, 1e-5);
}

TEST(OuOracle, EvenAndNonnegative)
{
    const auto o = ou_killed_oracle(-1.0, 1.0, 0.5, 1000);
    const std::size_t n = o.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(o.phi[i], o.phi[n - 1 - i], 1e-9);
        EXPECT_NEAR(o.rho[i], o.rho[n - 1 - i], 1e-9);
        EXPECT_GE(o.phi[i], 0.0);
    }
    EXPECT_EQ(o.phi.front(), 0.0);
    EXPECT_EQ(o.phi.back(), 0.0);
}

TEST(OuOracle, DensityIsPhiTimesWeight)
{
    const auto o = ou_killed_oracle(-1.0, 2.0, 0.7, 500);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < o.x.size(); ++i) {
        mass += 0.5 * (o.x[i + 1] - o.x[i]) * (o.rho[i] + o.rho[i + 1]);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
    const std::size_t mid = o.x.size() / 2;
    const double c = o.rho[mid] / (o.phi[mid] * std::exp(-1.4 * o.x[mid] * o.x[mid]));
    for (std::size_t i = 1; i + 1 < o.x.size(); i += 37) {
        EXPECT_NEAR(o.rho[i], c * o.phi[i] * std::exp(-1.4 * o.x[i] * o.x[i]), 1e-10);
    }
}

TEST(OuOracle, HistogramIntegratesDensity)
{
    const auto o = ou_killed_oracle(-1.0, 1.0, 0.5, 2000);
    const auto h = oracle_histogram(o, Binning{-1.0, 1.0, 20});
    double total = 0.0;
    for (double m : h.mass) {
        total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (std::size_t i = 0; i < 10; ++i) {
        EXPECT_NEAR(h.mass[i], h.mass[19 - i], 1e-9);
    }
    // Middle bin against phi ~ cos(pi x / 2) e^{-x^2} midpoint rule scale.
    EXPECT_GT(h.mass[10], h.mass[15]);
    EXPECT_EQ(h.statistic, Statistic::coordinate(0));
}

TEST(OuOracle, RejectsBadInput)
{
    EXPECT_THROW(ou_killed_oracle(1.0, 1.0, 0.5, 1000), InvalidArgument);
    EXPECT_THROW(ou_killed_oracle(-1.0, 1.0, 0.5, 10), InvalidArgument);
}

TEST(MeanExitTime, BrownianQuadratic)
{
    for (double x : {-0.5, 0.0, 0.3, 0.9}) {
        EXPECT_NEAR(ou_mean_exit_time(-1.0, 1.0, 0.0, 999, x), (x + 1.0) * (1.0 - x), 1e-9) << x;
    }
    EXPECT_EQ(ou_mean_exit_time(-1.0, 1.0, 0.5, 999, 1.0), 0.0);
}

TEST(MeanExitTime, ConfinementLengthensExit)
{
    const double bm = ou_mean_exit_time(-1.0, 1.0, 0.0, 999, 0.0);
    const double ou = ou_mean_exit_time(-1.0, 1.0, 0.5, 999, 0.0);
    EXPECT_GT(ou, bm);
    // Truncating the far end of a half-line barely matters.
    EXPECT_NEAR(ou_mean_exit_time(-8.0, 1.0, 0.5, 4000, 0.0), ou_mean_exit_time(-10.0, 1.0, 0.5, 5000, 0.0), 1e-3);
}

// u = (x2 - x1) / sqrt2 has density proportional to u^{2 gamma} e^{-2 a u^2},
// and s = (x1 + x2) / sqrt2 is an independent N(0, 1/(4a)).
TEST(BetaMoments, ClosedForms)
{
    for (double gamma : {0.25, 0.75, 1.5}) {
        for (double a : {0.5, 1.0}) {
            const double gap = std::numbers::sqrt2 * std::tgamma(gamma + 1.0) /
                               (std::tgamma(gamma + 0.5) * std::sqrt(2.0 * a));
            const double gap_sq = (2.0 * gamma + 1.0) / (2.0 * a);
            EXPECT_NEAR(beta_ensemble_moment_oracle(gamma, a, Moment::gap), gap, 1e-8 * gap);
            EXPECT_NEAR(beta_ensemble_moment_oracle(gamma, a, Moment::gap_squared), gap_sq, 1e-8 * gap_sq);
            EXPECT_NEAR(beta_ensemble_moment_oracle(gamma, a, Moment::sum), 0.0, 1e-10);
            EXPECT_NEAR(beta_ensemble_moment_oracle(gamma, a, Moment::sum_squared), 1.0 / (2.0 * a), 1e-6 / (2.0 * a));
        }
    }
}

TEST(BetaMoments, NamesAndErrors)
{
    EXPECT_STREQ(to_string(Moment::gap_squared), "gap_squared");
    EXPECT_THROW(beta_ensemble_moment_oracle(0.0, 0.5, Moment::gap), InvalidArgument);
    EXPECT_THROW(beta_ensemble_moment_oracle(0.25, 0.0, Moment::gap), InvalidArgument);
}
