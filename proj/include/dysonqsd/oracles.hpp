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
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "dysonqsd/errors.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/qsd.hpp"

namespace dysonqsd {

/// Principal Dirichlet eigenpair of the one-particle killed OU generator.
struct OuOracle {
    double lambda = 0.0;
    /// Grid including both endpoints, where phi = rho = 0.
    std::vector<double> x;
    /// Eigenfunction, max-normalized to 1.
    std::vector<double> phi;
    /// QSD density phi e^{-2v}, integrating to 1 (trapezoid).
    std::vector<double> rho;
};

namespace detail {

inline void check_interval(double l, double r, std::size_t grid_size)
{
    if (!(l < r) || !std::isfinite(l) || !std::isfinite(r)) {
        throw InvalidArgument("need a finite interval l < r");
    }
    if (grid_size < 200) {
        throw InvalidArgument("grid_size must be >= 200");
    }
}

/// Thomas algorithm for a symmetric tridiagonal system.
inline Eigen::VectorXd solve_symmetric_tridiagonal(const Eigen::VectorXd& diag, const Eigen::VectorXd& off,
                                                   Eigen::VectorXd rhs)
{
    const Eigen::Index n = diag.size();
    Eigen::VectorXd d = diag;
    for (Eigen::Index i = 1; i < n; ++i) {
        const double w = off[i - 1] / d[i - 1];
        d[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= d[n - 1];
    for (Eigen::Index i = n - 1; i-- > 0;) {
        rhs[i] = (rhs[i] - off[i] * rhs[i + 1]) / d[i];
    }
    return rhs;
}

}  // namespace detail

/// Smallest eigenvalue of -(1/2 d^2 - v' d) on (l, r) with zero boundary
/// values, v(x) = a x^2. `grid_size` interior nodes, central differences.
/// The nonsymmetric matrix is similar to a symmetric tridiagonal one (the
/// operator is self-adjoint in L^2(e^{-2v})), which Eigen diagonalizes.
inline OuOracle ou_killed_oracle(double l, double r, double a, std::size_t grid_size)
{
    detail::check_interval(l, r, grid_size);
    const std::size_t n = grid_size;
    const double h = (r - l) / static_cast<double>(n + 1);
    const double h2 = h * h;
    std::vector<double> xs(n + 2);
    for (std::size_t i = 0; i < n + 2; ++i) {
        xs[i] = l + h * static_cast<double>(i);
    }
    xs.back() = r;
    auto drift = [&](std::size_t node) { return 2.0 * a * xs[node]; };
    // Row i (node i + 1): lower c_i phi_{i-1} + diag phi_i + upper b_i phi_{i+1}.
    std::vector<double> upper(n);
    std::vector<double> lower(n);
    for (std::size_t i = 0; i < n; ++i) {
        upper[i] = -0.5 / h2 + drift(i + 1) / (2.0 * h);
        lower[i] = -0.5 / h2 - drift(i + 1) / (2.0 * h);
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / h2);
    Eigen::VectorXd off(static_cast<Eigen::Index>(n - 1));
    // log of the similarity scaling s_i with s_{i+1} / s_i = sqrt(upper_i / lower_{i+1}).
    std::vector<double> log_s(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double prod = upper[i] * lower[i + 1];
        if (!(upper[i] < 0.0 && lower[i + 1] < 0.0)) {
            throw InvalidArgument("grid too coarse for the drift (increase grid_size)");
        }
        off[static_cast<Eigen::Index>(i)] = -std::sqrt(prod);
        log_s[i + 1] = log_s[i] + 0.5 * (std::log(-upper[i]) - std::log(-lower[i + 1]));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw InvalidArgument("tridiagonal eigensolve failed");
    }
    OuOracle out;
    out.lambda = solver.eigenvalues()[0];
    out.x = xs;
    out.phi.assign(n + 2, 0.0);
    // Eigenvector by inverse iteration; the shift sits just below the
    // smallest eigenvalue, so the shifted matrix is positive definite and
    // the Thomas solve needs no pivoting.
    const double shift = out.lambda - 1e-9 * std::max(1.0, std::abs(out.lambda));
    Eigen::VectorXd psi = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    for (int it = 0; it < 3; ++it) {
        psi = detail::solve_symmetric_tridiagonal(diag.array() - shift, off, psi);
        psi.normalize();
    }
    // phi = S^{-1} psi (up to scale); work in logs to avoid overflow.
    double sign = psi.sum() < 0.0 ? -1.0 : 1.0;
    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> lp(n);
    for (std::size_t i = 0; i < n; ++i) {
        lp[i] = std::log(std::max(std::abs(psi[static_cast<Eigen::Index>(i)]), 1e-300)) - log_s[i];
        max_log = std::max(max_log, lp[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.phi[i + 1] = sign * std::copysign(std::exp(lp[i] - max_log), psi[static_cast<Eigen::Index>(i)]);
    }
    out.rho.assign(n + 2, 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i < n + 2; ++i) {
        out.rho[i] = out.phi[i] * std::exp(-2.0 * a * xs[i] * xs[i]);
    }
    for (std::size_t i = 0; i + 1 < n + 2; ++i) {
        mass += 0.5 * h * (out.rho[i] + out.rho[i + 1]);
    }
    for (double& v : out.rho) {
        v /= mass;
    }
    return out;
}

/// Bin masses of the piecewise-linear oracle density (values outside the
/// binning range are clamped into the end bins, as for sample histograms).
inline Histogram oracle_histogram(const OuOracle& o, Binning b)
{
    b.validate();
    Histogram hist{Statistic::coordinate(0), b, std::vector<double>(b.n_bins, 0.0)};
    for (std::size_t i = 0; i + 1 < o.x.size(); ++i) {
        const double x0 = o.x[i];
        const double x1 = o.x[i + 1];
        const double r0 = o.rho[i];
        const double slope = (o.rho[i + 1] - r0) / (x1 - x0);
        auto integral = [&](double u, double v) {
            // Integral of the linear piece over [u, v].
            const double mu = 0.5 * (u + v);
            return (v - u) * (r0 + slope * (mu - x0));
        };
        double left = x0;
        while (left < x1) {
            const std::size_t bin = b.index(left + 1e-15 * std::max(1.0, std::abs(left)));
            double right = x1;
            if (bin + 1 < b.n_bins) {
                right = std::min(x1, b.edge(bin + 1));
            }
            if (right <= left) {
                right = x1;
            }
            hist.mass[bin] += integral(left, right);
            left = right;
        }
    }
    double total = 0.0;
    for (double m : hist.mass) {
        total += m;
    }
    for (double& m : hist.mass) {
        m /= total;
    }
    return hist;
}

/// Mean exit time E_x[sigma] from (l, r) for the one-particle OU process:
/// solves (1/2 m'' - v' m') = -1, m(l) = m(r) = 0, and interpolates at x0.
inline double ou_mean_exit_time(double l, double r, double a, std::size_t grid_size, double x0)
{
    detail::check_interval(l, r, grid_size);
    if (!(x0 > l && x0 < r)) {
        return 0.0;
    }
    const std::size_t n = grid_size;
    const double h = (r - l) / static_cast<double>(n + 1);
    const double h2 = h * h;
    // Thomas algorithm on -L m = 1.
    std::vector<double> up(n);
    std::vector<double> lo(n);
    std::vector<double> dg(n, 1.0 / h2);
    std::vector<double> rhs(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = l + h * static_cast<double>(i + 1);
        up[i] = -0.5 / h2 + a * x / h;
        lo[i] = -0.5 / h2 - a * x / h;
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lo[i] / dg[i - 1];
        dg[i] -= w * up[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> m(n + 2, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        m[i + 1] = (rhs[i] - (i + 1 < n ? up[i] * m[i + 2] : 0.0)) / dg[i];
    }
    const double pos = (x0 - l) / h;
    const auto k = std::min(static_cast<std::size_t>(pos), n);
    const double f = pos - static_cast<double>(k);
    return (1.0 - f) * m[k] + f * m[k + 1];
}

/// Named moments of the two-particle stationary law.
enum class Moment { gap, gap_squared, sum, sum_squared };

inline const char* to_string(Moment m)
{
    switch (m) {
    case Moment::gap: return "gap";
    case Moment::gap_squared: return "gap_squared";
    case Moment::sum: return "sum";
    case Moment::sum_squared: return "sum_squared";
    }
    return "?";
}

inline std::function<double(double, double)> moment_function(Moment m)
{
    switch (m) {
    case Moment::gap: return [](double x1, double x2) { return x2 - x1; };
    case Moment::gap_squared: return [](double x1, double x2) { return (x2 - x1) * (x2 - x1); };
    case Moment::sum: return [](double x1, double x2) { return x1 + x2; };
    case Moment::sum_squared: return [](double x1, double x2) { return (x1 + x2) * (x1 + x2); };
    }
    return {};
}

/// E[f(x1, x2)] under the density proportional to (x2 - x1)^{2 gamma}
/// exp(-2 a (x1^2 + x2^2)) on x1 < x2, by nested double-exponential
/// quadrature in rotated coordinates u = (x2 - x1)/sqrt2 > 0, s = (x1 + x2)/sqrt2.
inline double beta_ensemble_moment(double gamma, double a, const std::function<double(double, double)>& f)
{
    if (!(gamma > 0.0)) {
        throw InvalidArgument("gamma must be > 0");
    }
    if (!(a > 0.0)) {
        throw InvalidArgument("the stationary law needs a > 0");
    }
    const double tol = 1e-12;
    boost::math::quadrature::exp_sinh<double> outer;
    boost::math::quadrature::sinh_sinh<double> inner;
    auto weight = [&](double u, double s) {
        if (!std::isfinite(u) || !std::isfinite(s)) {
            return 0.0;
        }
        return std::exp(2.0 * gamma * std::log(std::numbers::sqrt2 * u) - 2.0 * a * (u * u + s * s));
    };
    auto integrate = [&](auto&& g) {
        return outer.integrate(
            [&](double u) {
                return inner.integrate(
                    [&](double s) {
                        // The tails underflow to 0 while f may overflow.
                        const double w = weight(u, s);
                        return w == 0.0 ? 0.0 : g(u, s) * w;
                    },
                    tol);
            },
            tol);
    };
    const double z = integrate([](double, double) { return 1.0; });
    const double num = integrate([&](double u, double s) {
        const double x1 = (s - u) / std::numbers::sqrt2;
        const double x2 = (s + u) / std::numbers::sqrt2;
        return f(x1, x2);
    });
    return num / z;
}

inline double beta_ensemble_moment_oracle(double gamma, double a, Moment m)
{
    return beta_ensemble_moment(gamma, a, moment_function(m));
}

}  // namespace dysonqsd
