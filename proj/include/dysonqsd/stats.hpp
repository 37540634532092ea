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
#include <span>
#include <vector>

#include "dysonqsd/errors.hpp"

namespace dysonqsd::stats {

inline double mean(std::span<const double> xs)
{
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

/// Sample variance (n - 1 denominator).
inline double variance(std::span<const double> xs)
{
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(xs.size() - 1);
}

struct BatchMeans {
    double mean = 0.0;
    double stderr_ = 0.0;
};

/// Mean and standard error of a correlated time series by non-overlapping
/// batch means.
inline BatchMeans batch_means(std::span<const double> series, std::size_t n_batches)
{
    if (n_batches < 2 || series.size() < n_batches) {
        throw InvalidArgument("batch_means needs at least n_batches >= 2 points");
    }
    const std::size_t len = series.size() / n_batches;
    std::vector<double> means;
    means.reserve(n_batches);
    for (std::size_t b = 0; b < n_batches; ++b) {
        means.push_back(mean(series.subspan(b * len, len)));
    }
    return {mean(means), std::sqrt(variance(means) / static_cast<double>(n_batches))};
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope x.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgument("linear_fit needs two equally sized samples of length >= 2");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

/// Two-sample Kolmogorov-Smirnov statistic. Infinite values stand for
/// "not observed before the horizon" and never enter either CDF.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) {
        throw InvalidArgument("ks_two_sample needs non-empty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double t = std::numeric_limits<double>::infinity();
        if (i < a.size()) {
            t = std::min(t, a[i]);
        }
        if (j < b.size()) {
            t = std::min(t, b[j]);
        }
        if (std::isinf(t)) {
            break;
        }
        while (i < a.size() && a[i] <= t) {
            ++i;
        }
        while (j < b.size() && b[j] <= t) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// One-sample KS statistic against `cdf`, with the supremum restricted to
/// [0, horizon] (samples above the horizon are censored).
inline double ks_against_cdf(std::vector<double> samples, const std::function<double(double)>& cdf,
                             double horizon = std::numeric_limits<double>::infinity())
{
    if (samples.empty()) {
        throw InvalidArgument("ks_against_cdf needs samples");
    }
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    std::size_t k = 0;
    for (; k < samples.size() && samples[k] <= horizon; ++k) {
        const double f = cdf(samples[k]);
        d = std::max(d, std::abs(f - static_cast<double>(k) / n));
        d = std::max(d, std::abs(f - static_cast<double>(k + 1) / n));
    }
    if (std::isfinite(horizon)) {
        d = std::max(d, std::abs(cdf(horizon) - static_cast<double>(k) / n));
    }
    return d;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
inline Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054)
{
    if (trials == 0) {
        throw InvalidArgument("wilson_interval needs trials > 0");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

/// Pool-adjacent-violators fit of a weakly decreasing sequence (least squares,
/// optional weights).
inline std::vector<double> isotonic_decreasing(std::span<const double> y, std::span<const double> w = {})
{
    struct Block {
        double value;
        double weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        blocks.push_back({y[i], w.empty() ? 1.0 : w[i], 1});
        while (blocks.size() >= 2 && blocks[blocks.size() - 2].value < blocks.back().value) {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            const double wt = a.weight + b.weight;
            a.value = (a.value * a.weight + b.value * b.weight) / wt;
            a.weight = wt;
            a.count += b.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const Block& b : blocks) {
        out.insert(out.end(), b.count, b.value);
    }
    return out;
}

}  // namespace dysonqsd::stats
