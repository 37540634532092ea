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

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dysonqsd/collision.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/noise.hpp"
#include "dysonqsd/oracles.hpp"
#include "dysonqsd/parallel.hpp"
#include "dysonqsd/qsd.hpp"
#include "dysonqsd/stats.hpp"

namespace dysonqsd::cli {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace detail {

inline std::vector<double> random_start(const NoiseStream& s, std::size_t n, std::uint64_t k)
{
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = 2.0 * s.gaussian_pair(StreamTag::draw, k, static_cast<std::uint32_t>(i))[0];
    }
    std::sort(x.begin(), x.end());
    return x;
}

}  // namespace detail

/// Small-scale property suite over every module (a few seconds on one core).
inline std::vector<CheckResult> run_invariant_suite(std::uint64_t seed, WorkerPool& pool)
{
    std::vector<CheckResult> out;
    auto check = [&](const std::string& name, const std::function<std::string()>& body) {
        try {
            const std::string failure = body();
            out.push_back({name, failure.empty(), failure.empty() ? "ok" : failure});
        }
        catch (const std::exception& e) {
            out.push_back({name, false, std::string("exception: ") + e.what()});
        }
    };
    const NoiseStream base{seed, 0, 1, false};

    check("philox_known_answer", [] {
        const auto r = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
        const bool ok = r[0] == 0x6627e8d5u && r[1] == 0xe169c58du && r[2] == 0xbc57ac4cu && r[3] == 0x9b00dbd8u;
        return ok ? std::string() : std::string("zero counter/key mismatch");
    });

    check("noise_refine_coupling", [&] {
        // dt with refine 2 equals the sum of two dt/2 steps.
        const NoiseStream fine = base.with_path(7);
        NoiseStream coarse = fine;
        coarse.refine = 2;
        std::vector<double> a(3), b(3), c(3);
        coarse.increments(5, 0.01, a);
        fine.increments(10, 0.005, b);
        fine.increments(11, 0.005, c);
        for (std::size_t i = 0; i < 3; ++i) {
            if (std::abs(a[i] - (b[i] + c[i])) > 1e-14) {
                return std::string("refined increments do not add up");
            }
        }
        return std::string();
    });

    check("prox_properties", [&] {
        for (std::uint64_t k = 0; k < 50; ++k) {
            const auto x = detail::random_start(base, 4, k);
            const auto y = moreau_prox(x, 100.0, 0.25, 1e-10);
            if (!y.in_open_chamber()) {
                return std::string("prox left the open chamber");
            }
            double mx = 0.0;
            double my = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                mx += x[i];
                my += y[i];
            }
            if (std::abs(mx - my) > 1e-9) {
                return std::string("prox moved the centre of mass");
            }
            auto g = interaction_grad(y, 0.25);
            for (std::size_t i = 0; i < 4; ++i) {
                if (std::abs(g[i] + 100.0 * (y[i] - x[i])) > 1e-8) {
                    return std::string("prox optimality residual too large");
                }
            }
        }
        return std::string();
    });

    check("schemes_stay_ordered", [&] {
        for (Scheme sc : {Scheme::sorted_tamed_explicit, Scheme::gap_implicit, Scheme::yosida_penalized}) {
            SchemeConfig cfg;
            cfg.scheme = sc;
            cfg.dt = 1e-3;
            ModelParams p{3, 0.25, VSpec::quadratic(0.5)};
            Stepper st(p, cfg);
            for (std::uint64_t k = 0; k < 20; ++k) {
                std::vector<double> x = detail::random_start(base, 3, 100 + k);
                if (sc != Scheme::sorted_tamed_explicit) {
                    x = moreau_prox(x, 1000.0, 0.25, 1e-10).vector();
                }
                const NoiseStream s = base.with_path(k);
                std::vector<double> noise(3);
                for (std::uint64_t j = 0; j < 200; ++j) {
                    s.increments(j, cfg.dt, noise);
                    st.advance(x, noise);
                    if (!std::is_sorted(x.begin(), x.end())) {
                        return std::string(to_string(sc)) + " produced an unsorted state";
                    }
                    if (sc == Scheme::gap_implicit && !strictly_increasing(x)) {
                        return std::string("gap_implicit left the open chamber");
                    }
                }
            }
        }
        return std::string();
    });

    check("gap_implicit_two_particle_root", [] {
        SchemeConfig cfg;
        cfg.scheme = Scheme::gap_implicit;
        cfg.dt = 1e-2;
        cfg.prox_tol = 1e-13;
        ModelParams p{2, 0.25, VSpec::zero()};
        const std::vector<double> noise{0.05, -0.02};
        const auto y = step(Configuration{0.0, 0.1}, cfg, p, noise);
        const double ge = 0.1 - 0.07;
        const double expected = 0.5 * (ge + std::sqrt(ge * ge + 8.0 * 0.25 * 0.01));
        return std::abs((y[1] - y[0]) - expected) < 1e-10 ? std::string() : std::string("gap root mismatch");
    });

    check("interaction_energy_off_chamber", [] {
        const double e = interaction_energy(std::vector<double>{0.0, 0.0}, 0.25);
        return std::isinf(e) && e > 0 ? std::string() : std::string("expected +inf on a tie");
    });

    check("survival_monotone", [&] {
        ModelParams p{1, 1.0, VSpec::quadratic(0.5)};
        SchemeConfig cfg;
        cfg.dt = 1e-3;
        KilledRunOptions opt;
        opt.n_paths = 400;
        opt.seed = seed;
        const auto c = survival_curve(Configuration{0.0}, Region::box({-1.0}, {1.0}), 2.0, cfg, p, opt, pool, 50);
        if (c.survival.front() != 1.0) {
            return std::string("survival(0) != 1");
        }
        for (std::size_t i = 0; i < c.survival.size(); ++i) {
            if (i > 0 && c.survival[i] > c.survival[i - 1]) {
                return std::string("survival not weakly decreasing");
            }
            if (std::abs(c.survival[i] - c.raw[i]) > 2.0 * c.stderr_[i] + 1e-15) {
                return std::string("isotonic correction exceeds 2 standard errors");
            }
        }
        return std::string();
    });

    check("fv_containment_and_normalization", [&] {
        ModelParams p{2, 0.25, VSpec::quadratic(0.5)};
        SchemeConfig cfg;
        cfg.dt = 1e-3;
        const Region r = Region::gap_cap_of(1.0);
        FleetStepper fs(p, cfg, r, seed, false, pool);
        FVEnsemble e = make_ensemble(SampleMeasure::point(Configuration{0.0, 0.5}), 50, seed);
        for (int k = 0; k < 300; ++k) {
            fs.step(e);
            for (const auto& x : e.particles) {
                if (!r.contains(x)) {
                    return std::string("particle outside the region after a step");
                }
            }
        }
        std::vector<Configuration> xs;
        for (const auto& x : e.particles) {
            xs.emplace_back(x);
        }
        const auto h = histogram(SampleMeasure(std::move(xs)), Statistic::min_gap(), Binning{0.0, 1.0, 20});
        double total = 0.0;
        for (double m : h.mass) {
            total += m;
        }
        return std::abs(total - 1.0) < 1e-12 ? std::string() : std::string("histogram mass does not sum to 1");
    });

    check("tv_distance_examples", [] {
        const Binning b{0.0, 1.0, 2};
        const Histogram a{Statistic::min_gap(), b, {0.5, 0.5}};
        const Histogram c{Statistic::min_gap(), b, {0.25, 0.75}};
        const Histogram d{Statistic::min_gap(), b, {1.0, 0.0}};
        const Histogram e{Statistic::min_gap(), b, {0.0, 1.0}};
        const bool ok = tv_distance(a, a) == 0.0 && std::abs(tv_distance(a, c) - 0.25) < 1e-15 &&
                        tv_distance(d, e) == 1.0;
        return ok ? std::string() : std::string("tv examples failed");
    });

    check("ou_oracle_closed_forms", [] {
        const auto bm = ou_killed_oracle(0.0, std::numbers::pi, 0.0, 400);
        if (std::abs(bm.lambda - 0.5) > 1e-4) {
            return std::string("Brownian Dirichlet eigenvalue off");
        }
        const auto ou = ou_killed_oracle(-1.0, 1.0, 0.5, 400);
        for (std::size_t i = 0; i < ou.phi.size(); ++i) {
            if (std::abs(ou.phi[i] - ou.phi[ou.phi.size() - 1 - i]) > 1e-9 || ou.phi[i] < 0.0) {
                return std::string("OU eigenfunction not even and nonnegative");
            }
        }
        return std::string();
    });

    check("beta_moment_sum_squared", [] {
        const double m = beta_ensemble_moment_oracle(0.25, 0.5, Moment::sum_squared);
        return std::abs(m - 1.0) < 1e-6 ? std::string() : std::string("E[(x1+x2)^2] != 1/(2a)");
    });

    check("besq_oracle_closed_form", [&] {
        BesqOracleOptions opt;
        opt.seed = seed;
        opt.horizon = 20.0;
        const auto s = besq_hitting_oracle(1.5, 0.5, 2000, 1e-2, opt, pool);
        const double ks = stats::ks_against_cdf(s, [](double t) { return besq_hitting_cdf(1.5, 0.5, t); }, 20.0);
        // 0.1% critical value at 2000 samples.
        return ks < 1.95 / std::sqrt(2000.0) ? std::string() : "KS " + std::to_string(ks);
    });

    return out;
}

}  // namespace dysonqsd::cli
