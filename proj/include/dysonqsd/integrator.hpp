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
#include <span>
#include <string>
#include <vector>

#include "dysonqsd/errors.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/noise.hpp"

namespace dysonqsd {

enum class Scheme { sorted_tamed_explicit, gap_implicit, yosida_penalized };

inline const char* to_string(Scheme s)
{
    switch (s) {
    case Scheme::sorted_tamed_explicit: return "sorted_tamed_explicit";
    case Scheme::gap_implicit: return "gap_implicit";
    case Scheme::yosida_penalized: return "yosida_penalized";
    }
    return "?";
}

struct SchemeConfig {
    Scheme scheme = Scheme::sorted_tamed_explicit;
    double dt = 1e-4;
    /// Per-coordinate drift bound is taming_cap / sqrt(dt) (explicit scheme only).
    double taming_cap = 2.0;
    /// Absolute residual tolerance of the proximal Newton solve.
    double prox_tol = 1e-8;
    /// Penalty n of the Moreau-Yosida scheme.
    double penalty_n = 100.0;
    int prox_max_iter = 50;

    void validate() const
    {
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw InvalidArgument("dt must be > 0");
        }
        if (!(taming_cap > 0.0)) {
            throw InvalidArgument("taming_cap must be > 0");
        }
        if (!(prox_tol > 0.0)) {
            throw InvalidArgument("prox_tol must be > 0");
        }
        if (scheme == Scheme::yosida_penalized && !(penalty_n >= 1.0)) {
            throw InvalidArgument("penalty_n must be >= 1");
        }
        if (prox_max_iter < 1) {
            throw InvalidArgument("prox_max_iter must be >= 1");
        }
    }
};

/// Newton solver for prox(x) = argmin_y V_I(y) + n |x - y|^2 / 2 over the open
/// chamber. Keeps its own scratch space; not thread-safe, one per worker.
class ProxSolver {
public:
    explicit ProxSolver(std::size_t n_particles = 0) { resize(n_particles); }

    /// Writes prox(x) into `y` and returns the Newton iteration count.
    /// `x` may be in any order.
    int solve(std::span<const double> x, double n, double gamma, double tol, int max_iter, std::span<double> y)
    {
        const std::size_t dim = x.size();
        resize(dim);
        if (dim == 1) {
            y[0] = x[0];
            return 0;
        }
        sorted_.assign(x.begin(), x.end());
        std::sort(sorted_.begin(), sorted_.end());
        x = sorted_;
        initial_guess(x, n, gamma, y);
        for (int iter = 0; iter <= max_iter; ++iter) {
            // Gradient and Hessian of V_I(y) + n |y - x|^2 / 2.
            std::fill(hess_.begin(), hess_.end(), 0.0);
            double res = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                grad_[i] = n * (y[i] - x[i]);
                hess_[i * dim + i] = n;
            }
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = i + 1; j < dim; ++j) {
                    const double d = y[j] - y[i];
                    const double q = gamma / d;
                    const double h = q / d;
                    grad_[i] += q;
                    grad_[j] -= q;
                    hess_[i * dim + i] += h;
                    hess_[j * dim + j] += h;
                    hess_[i * dim + j] -= h;
                    hess_[j * dim + i] -= h;
                }
            }
            for (std::size_t i = 0; i < dim; ++i) {
                res += grad_[i] * grad_[i];
            }
            if (std::sqrt(res) <= tol) {
                return iter;
            }
            if (iter == max_iter) {
                break;
            }
            cholesky_solve(dim);  // dir_ = -H^{-1} grad
            // Damped Newton for the self-concordant F / gamma: a step of
            // 1 / (1 + decrement) stays inside the domain.
            double dhd = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                dhd -= dir_[i] * grad_[i];
            }
            const double decrement = std::sqrt(std::max(0.0, dhd) / gamma);
            double step = decrement > 0.25 ? 1.0 / (1.0 + decrement) : 1.0;
            for (int halving = 0;; ++halving) {
                for (std::size_t i = 0; i < dim; ++i) {
                    trial_[i] = y[i] + step * dir_[i];
                }
                if (strictly_increasing(trial_)) {
                    break;
                }
                if (halving > 60) {
                    throw ProxNoConvergence("line search left the chamber");
                }
                step *= 0.5;
            }
            std::copy(trial_.begin(), trial_.end(), y.begin());
        }
        throw ProxNoConvergence("prox Newton did not converge in " + std::to_string(max_iter) +
                                " iterations");
    }

private:
    void resize(std::size_t dim)
    {
        if (grad_.size() != dim) {
            grad_.assign(dim, 0.0);
            dir_.assign(dim, 0.0);
            trial_.assign(dim, 0.0);
            hess_.assign(dim * dim, 0.0);
        }
    }

    /// Sorted x with gaps floored at sqrt(gamma / (2n)), shifted back to the
    /// mean of x (the prox preserves the mean since grad V_I sums to zero).
    void initial_guess(std::span<const double> x, double n, double gamma, std::span<double> y)
    {
        const std::size_t dim = x.size();
        std::copy(x.begin(), x.end(), y.begin());
        std::sort(y.begin(), y.end());
        const double floor_gap = std::sqrt(gamma / (2.0 * n));
        double mean_x = 0.0;
        for (double v : x) {
            mean_x += v;
        }
        mean_x /= static_cast<double>(dim);
        for (std::size_t i = 1; i < dim; ++i) {
            y[i] = std::max(y[i], y[i - 1] + floor_gap);
        }
        double mean_y = 0.0;
        for (double v : y) {
            mean_y += v;
        }
        mean_y /= static_cast<double>(dim);
        for (double& v : y) {
            v += mean_x - mean_y;
        }
    }

    /// In-place Cholesky of hess_, then dir_ = -H^{-1} grad_.
    void cholesky_solve(std::size_t dim)
    {
        double* a = hess_.data();
        for (std::size_t j = 0; j < dim; ++j) {
            double s = a[j * dim + j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= a[j * dim + k] * a[j * dim + k];
            }
            const double l = std::sqrt(s);
            a[j * dim + j] = l;
            for (std::size_t i = j + 1; i < dim; ++i) {
                double t = a[i * dim + j];
                for (std::size_t k = 0; k < j; ++k) {
                    t -= a[i * dim + k] * a[j * dim + k];
                }
                a[i * dim + j] = t / l;
            }
        }
        for (std::size_t i = 0; i < dim; ++i) {
            double t = -grad_[i];
            for (std::size_t k = 0; k < i; ++k) {
                t -= a[i * dim + k] * dir_[k];
            }
            dir_[i] = t / a[i * dim + i];
        }
        for (std::size_t ii = dim; ii-- > 0;) {
            double t = dir_[ii];
            for (std::size_t k = ii + 1; k < dim; ++k) {
                t -= a[k * dim + ii] * dir_[k];
            }
            dir_[ii] = t / a[ii * dim + ii];
        }
    }

    std::vector<double> sorted_;
    std::vector<double> grad_;
    std::vector<double> dir_;
    std::vector<double> trial_;
    std::vector<double> hess_;
};

/// Moreau-Yosida proximal point of V_I at penalty n. The penalized interaction
/// drift is n (x - prox(x)).
inline Configuration moreau_prox(std::span<const double> x, double n, double gamma, double tol, int max_iter = 50)
{
    if (!(n >= 1.0)) {
        throw InvalidArgument("penalty n must be >= 1");
    }
    if (!(gamma > 0.0)) {
        throw InvalidArgument("gamma must be > 0");
    }
    std::vector<double> y(x.size());
    ProxSolver solver(x.size());
    solver.solve(x, n, gamma, tol, max_iter, y);
    return Configuration(std::move(y));
}

struct StepOutcome {
    /// The raw (pre-sort) update put two neighbours out of order.
    bool crossed = false;
};

/// One time step of dX = -grad V_c dt - grad V_I dt + dB under a chosen scheme.
/// Holds scratch buffers; use one instance per worker.
class Stepper {
public:
    Stepper(const ModelParams& p, const SchemeConfig& cfg) : p_(p), cfg_(cfg), prox_(p.n_particles)
    {
        p_.validate();
        cfg_.validate();
        scratch_.assign(p.n_particles, 0.0);
        work_.assign(p.n_particles, 0.0);
        drift_cap_ = cfg_.taming_cap / std::sqrt(cfg_.dt);
    }

    const ModelParams& params() const { return p_; }
    const SchemeConfig& config() const { return cfg_; }

    /// Advances `x` in place. `noise` holds the N Brownian increments (already
    /// scaled by sqrt(dt)). If `dk` is non-empty it receives grad V_I dt as
    /// realised by the scheme.
    StepOutcome advance(std::span<double> x, std::span<const double> noise, std::span<double> dk = {})
    {
        switch (cfg_.scheme) {
        case Scheme::sorted_tamed_explicit: return tamed_explicit(x, noise, dk);
        case Scheme::gap_implicit: return gap_implicit(x, noise, dk);
        case Scheme::yosida_penalized: return yosida(x, noise, dk);
        }
        return {};
    }

private:
    StepOutcome tamed_explicit(std::span<double> x, std::span<const double> noise, std::span<double> dk)
    {
        const std::size_t n = x.size();
        const double dt = cfg_.dt;
        // Interaction drift -grad V_I; ties in the closed chamber get a huge
        // finite push that the cap then bounds.
        std::fill(scratch_.begin(), scratch_.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double q = p_.gamma / std::max(x[j] - x[i], 1e-200);
                scratch_[i] -= q;
                scratch_[j] += q;
            }
        }
        StepOutcome out;
        for (std::size_t i = 0; i < n; ++i) {
            const double confining = -p_.v.d1(x[i]);
            const double drift = std::clamp(confining + scratch_[i], -drift_cap_, drift_cap_);
            if (!dk.empty()) {
                dk[i] = -(drift - confining) * dt;
            }
            x[i] += drift * dt + noise[i];
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (x[i] < x[i - 1]) {
                out.crossed = true;
            }
        }
        if (out.crossed) {
            std::sort(x.begin(), x.end());
        }
        return out;
    }

    // Backward Euler on the interaction, forward on the confinement:
    // x' = prox_{1/dt}(x - dt v'(x) + dB). For N = 2 the gap solves
    // g' = g_e + 2 gamma dt / g', i.e. the positive root of a quadratic.
    StepOutcome gap_implicit(std::span<double> x, std::span<const double> noise, std::span<double> dk)
    {
        const std::size_t n = x.size();
        for (std::size_t i = 0; i < n; ++i) {
            work_[i] = x[i] - cfg_.dt * p_.v.d1(x[i]) + noise[i];
        }
        prox_.solve(work_, 1.0 / cfg_.dt, p_.gamma, cfg_.prox_tol, cfg_.prox_max_iter, x);
        if (!dk.empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                dk[i] = work_[i] - x[i];
            }
        }
        return {};
    }

    StepOutcome yosida(std::span<double> x, std::span<const double> noise, std::span<double> dk)
    {
        const std::size_t n = x.size();
        const double pen = cfg_.penalty_n;
        prox_.solve(x, pen, p_.gamma, cfg_.prox_tol, cfg_.prox_max_iter, work_);
        StepOutcome out;
        for (std::size_t i = 0; i < n; ++i) {
            const double penal = pen * (x[i] - work_[i]);
            if (!dk.empty()) {
                dk[i] = penal * cfg_.dt;
            }
            x[i] += cfg_.dt * (-p_.v.d1(x[i]) - penal) + noise[i];
        }
        for (std::size_t i = 1; i < n; ++i) {
            if (x[i] < x[i - 1]) {
                out.crossed = true;
            }
        }
        if (out.crossed) {
            std::sort(x.begin(), x.end());
        }
        return out;
    }

    ModelParams p_;
    SchemeConfig cfg_;
    ProxSolver prox_;
    std::vector<double> scratch_;
    std::vector<double> work_;
    double drift_cap_ = 0.0;
};

/// Single step, value in value out.
inline Configuration step(const Configuration& x, const SchemeConfig& cfg, const ModelParams& p,
                          std::span<const double> noise)
{
    if (x.size() != p.n_particles || noise.size() != p.n_particles) {
        throw InvalidArgument("configuration/noise size does not match n_particles");
    }
    Stepper stepper(p, cfg);
    std::vector<double> y = x.vector();
    stepper.advance(y, noise);
    return Configuration(std::move(y));
}

/// Number of steps covering [0, T]; T / dt must be an integer up to round-off.
inline std::uint64_t step_count(double T, double dt)
{
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw InvalidArgument("horizon T must be finite and >= 0");
    }
    const double ratio = T / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-6 * std::max(1.0, ratio)) {
        throw InvalidArgument("T / dt must be an integer");
    }
    return static_cast<std::uint64_t>(rounded);
}

struct Path {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<Configuration> states;
    /// crossed[k] refers to the step that produced states[k]; crossed[0] is false.
    std::vector<std::uint8_t> crossed;
    /// k_increments[k] = grad V_I dt realised by the step into states[k + 1].
    std::vector<std::vector<double>> k_increments;

    std::size_t size() const { return states.size(); }
};

/// Streams a trajectory through `observe(k, state, crossed)`, k = 1..n_steps.
/// The observer returns false to stop early. Returns the number of steps taken.
template <class Observer>
std::uint64_t run_path(std::span<const double> x0, std::uint64_t n_steps, Stepper& stepper, const NoiseStream& stream,
                       Observer&& observe, std::span<double> dk = {})
{
    const std::size_t n = x0.size();
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> noise(n);
    const double dt = stepper.config().dt;
    for (std::uint64_t k = 0; k < n_steps; ++k) {
        stream.increments(k, dt, noise);
        StepOutcome o;
        try {
            o = stepper.advance(x, noise, dk);
        }
        catch (const ProxNoConvergence& e) {
            throw ProxNoConvergence("step " + std::to_string(k + 1) + ": " + e.what());
        }
        catch (const CollisionConfiguration& e) {
            throw CollisionConfiguration("step " + std::to_string(k + 1) + ": " + e.what());
        }
        if (!observe(k + 1, std::span<const double>(x), o.crossed)) {
            return k + 1;
        }
    }
    return n_steps;
}

inline Path simulate_path(const Configuration& x0, double T, const SchemeConfig& cfg, const ModelParams& p,
                          const NoiseStream& stream, bool record_k = false)
{
    if (x0.size() != p.n_particles) {
        throw InvalidArgument("x0 size does not match n_particles");
    }
    Stepper stepper(p, cfg);
    const std::uint64_t n_steps = step_count(T, cfg.dt);
    Path path;
    path.dt = cfg.dt;
    path.times.reserve(n_steps + 1);
    path.states.reserve(n_steps + 1);
    path.times.push_back(0.0);
    path.states.push_back(x0);
    path.crossed.push_back(0);
    std::vector<double> dk(record_k ? p.n_particles : 0);
    run_path(
        x0.values(), n_steps, stepper, stream,
        [&](std::uint64_t k, std::span<const double> x, bool crossed) {
            path.times.push_back(static_cast<double>(k) * cfg.dt);
            path.states.emplace_back(std::vector<double>(x.begin(), x.end()));
            path.crossed.push_back(crossed ? 1 : 0);
            if (record_k) {
                path.k_increments.push_back(dk);
            }
            return true;
        },
        dk);
    return path;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    return std::sqrt(s);
}

struct CoupledPaths {
    Path x;
    Path y;
    /// distance[k] = |X_k(x) - X_k(y)|.
    std::vector<double> distance;
};

/// Two trajectories driven by the same Brownian increments.
inline CoupledPaths coupled_pair(const Configuration& x0, const Configuration& y0, double T, const SchemeConfig& cfg,
                                 const ModelParams& p, const NoiseStream& stream)
{
    CoupledPaths out{simulate_path(x0, T, cfg, p, stream), simulate_path(y0, T, cfg, p, stream), {}};
    out.distance.reserve(out.x.size());
    for (std::size_t k = 0; k < out.x.size(); ++k) {
        out.distance.push_back(euclidean_distance(out.x.states[k].values(), out.y.states[k].values()));
    }
    return out;
}

}  // namespace dysonqsd
