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
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "dysonqsd/errors.hpp"

namespace dysonqsd {

/// One-particle confining potential v. Only the quadratic family v(u) = a u^2
/// (and its a = 0 member) is supported.
struct VSpec {
    enum class Kind { quadratic, zero };

    Kind kind = Kind::zero;
    double a = 0.0;

    static VSpec quadratic(double a)
    {
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw InvalidArgument("quadratic potential needs a finite a >= 0");
        }
        return VSpec{Kind::quadratic, a};
    }
    static VSpec zero() { return VSpec{Kind::zero, 0.0}; }

    double coefficient() const { return kind == Kind::zero ? 0.0 : a; }

    double value(double u) const { return coefficient() * u * u; }
    double d1(double u) const { return 2.0 * coefficient() * u; }
    double d2(double) const { return 2.0 * coefficient(); }

    /// True when v'' / 2 - delta v'^2 -> -infinity for every delta > 0.
    bool lyapunov_admissible() const { return coefficient() > 0.0; }
};

enum class Regime { colliding, critical, non_colliding };

inline const char* to_string(Regime r)
{
    switch (r) {
    case Regime::colliding: return "colliding";
    case Regime::critical: return "critical";
    case Regime::non_colliding: return "non_colliding";
    }
    return "?";
}

struct ModelParams {
    std::size_t n_particles = 1;
    double gamma = 0.25;
    VSpec v = VSpec::quadratic(0.5);

    void validate() const
    {
        if (n_particles < 1) {
            throw InvalidArgument("n_particles must be >= 1");
        }
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw InvalidArgument("gamma must be finite and > 0");
        }
    }

    Regime regime() const
    {
        if (gamma < 0.5) {
            return Regime::colliding;
        }
        return gamma == 0.5 ? Regime::critical : Regime::non_colliding;
    }
};

/// Particle positions in the closed Weyl chamber: x[0] <= x[1] <= ... <= x[N-1].
class Configuration {
public:
    Configuration() = default;
    Configuration(std::initializer_list<double> xs) : Configuration(std::vector<double>(xs)) {}
    explicit Configuration(std::vector<double> xs) : x_(std::move(xs))
    {
        if (!std::is_sorted(x_.begin(), x_.end())) {
            throw InvalidArgument("configuration must be weakly increasing");
        }
        for (double v : x_) {
            if (!std::isfinite(v)) {
                throw InvalidArgument("configuration has a non-finite coordinate");
            }
        }
    }

    /// Sorts `xs` first; for exchangeable particles this is the projection onto the chamber.
    static Configuration from_unsorted(std::vector<double> xs)
    {
        std::sort(xs.begin(), xs.end());
        return Configuration(std::move(xs));
    }

    std::size_t size() const { return x_.size(); }
    double operator[](std::size_t i) const { return x_[i]; }
    std::span<const double> values() const { return x_; }
    const std::vector<double>& vector() const { return x_; }
    auto begin() const { return x_.begin(); }
    auto end() const { return x_.end(); }

    /// Smallest adjacent gap; +infinity for N < 2.
    double min_gap() const
    {
        double g = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < x_.size(); ++i) {
            g = std::min(g, x_[i] - x_[i - 1]);
        }
        return g;
    }

    bool in_open_chamber() const { return min_gap() > 0.0; }

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    std::vector<double> x_;
};

inline bool strictly_increasing(std::span<const double> x)
{
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(x[i] > x[i - 1])) {
            return false;
        }
    }
    return true;
}

/// (v'(x^1), ..., v'(x^N)).
inline std::vector<double> confining_grad(std::span<const double> x, const VSpec& v)
{
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        g[i] = v.d1(x[i]);
    }
    return g;
}

inline std::vector<double> confining_grad(const Configuration& x, const VSpec& v)
{
    return confining_grad(x.values(), v);
}

/// Adds grad V_I(x) into `out`. Each pair term is computed once and added with
/// opposite signs, so the components sum to zero up to round-off.
inline void accumulate_interaction_grad(std::span<const double> x, double gamma, std::span<double> out)
{
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = x[j] - x[i];
            if (d == 0.0) {
                throw CollisionConfiguration("coordinates " + std::to_string(i) + " and " + std::to_string(j) +
                                             " coincide");
            }
            const double q = gamma / d;
            out[i] += q;
            out[j] -= q;
        }
    }
}

/// grad V_I for V_I(x) = -gamma sum_{i<j} ln(x^j - x^i). Component i equals
/// -gamma sum_{j != i} 1 / (x^i - x^j); the simulated drift is its negative.
inline std::vector<double> interaction_grad(std::span<const double> x, double gamma)
{
    std::vector<double> g(x.size(), 0.0);
    accumulate_interaction_grad(x, gamma, g);
    return g;
}

inline std::vector<double> interaction_grad(const Configuration& x, double gamma)
{
    return interaction_grad(x.values(), gamma);
}

inline double confining_energy(std::span<const double> x, const VSpec& v)
{
    double e = 0.0;
    for (double xi : x) {
        e += v.value(xi);
    }
    return e;
}

/// V_I(x); +infinity off the open chamber.
inline double interaction_energy(std::span<const double> x, double gamma)
{
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double d = x[j] - x[i];
            if (!(d > 0.0)) {
                return std::numeric_limits<double>::infinity();
            }
            e -= gamma * std::log(d);
        }
    }
    return e;
}

/// H = V_c + V_I, equal to +infinity on the chamber boundary.
inline double energy(const Configuration& x, const ModelParams& p)
{
    const double vi = interaction_energy(x.values(), p.gamma);
    if (std::isinf(vi)) {
        return vi;
    }
    return confining_energy(x.values(), p.v) + vi;
}

/// (v'(u2) - v'(u1)) / (u2 - u1), extended by v''(u1) on the diagonal.
inline double divided_difference_J(double u1, double u2, const VSpec& v)
{
    if (u1 == u2) {
        return v.d2(u1);
    }
    return (v.d1(u2) - v.d1(u1)) / (u2 - u1);
}

/// L W / W for W = exp(alpha V_c), in the form that stays finite on the
/// chamber boundary:
///   alpha sum_i [v''(x^i)/2 - (1 - alpha/2) v'(x^i)^2] + gamma alpha sum_{i<j} J(x^i, x^j).
inline double lyapunov_ratio(const Configuration& x, double alpha, const ModelParams& p)
{
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw InvalidAlpha("alpha must lie in (0, 2)");
    }
    double single = 0.0;
    for (double xi : x) {
        const double d1 = p.v.d1(xi);
        single += p.v.d2(xi) / 2.0 - (1.0 - alpha / 2.0) * d1 * d1;
    }
    double pair = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            pair += divided_difference_J(x[i], x[j], p.v);
        }
    }
    return alpha * single + p.gamma * alpha * pair;
}

/// v''(u)/2 - delta v'(u)^2 on each grid point.
inline std::vector<double> growth_condition_probe(const VSpec& v, double delta, std::span<const double> u_grid)
{
    if (!(delta > 0.0)) {
        throw InvalidArgument("delta must be > 0");
    }
    std::vector<double> out;
    out.reserve(u_grid.size());
    for (double u : u_grid) {
        const double d1 = v.d1(u);
        out.push_back(v.d2(u) / 2.0 - delta * d1 * d1);
    }
    return out;
}

}  // namespace dysonqsd
