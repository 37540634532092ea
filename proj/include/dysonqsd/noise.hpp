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
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace dysonqsd {

/// Philox4x32-10 block cipher (Salmon et al., SC'11). Stateless: the output is
/// a pure function of (counter, key).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key)
    {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Independent sub-streams sharing one seed.
enum class StreamTag : std::uint32_t {
    brownian = 0,
    resample = 1,
    draw = 2,
    oracle = 3,
    bridge = 4,
};

/// Counter-addressed randomness. The Gaussian for (seed, path_index, step,
/// coordinate) is fixed once those four numbers are, so results do not depend
/// on scheduling or worker count.
struct NoiseStream {
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    /// Number of base draws summed into one increment. A path at step dt with
    /// refine = 2 sees exactly the Brownian path of a refine = 1 run at dt/2.
    std::uint32_t refine = 1;
    /// Test hook: every increment is zero.
    bool zeroed = false;

    NoiseStream with_path(std::uint64_t index) const
    {
        NoiseStream s = *this;
        s.path_index = index;
        return s;
    }

    /// 128 random bits for an arbitrary (tag, major, minor) address.
    std::array<std::uint32_t, 4> raw(StreamTag tag, std::uint64_t major, std::uint32_t minor) const
    {
        const Philox4x32::Counter ctr{minor, static_cast<std::uint32_t>(major),
                                      static_cast<std::uint32_t>((major >> 32) & 0xFFFFu) |
                                          (static_cast<std::uint32_t>(tag) << 16),
                                      static_cast<std::uint32_t>(path_index)};
        const Philox4x32::Key key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
        return Philox4x32::encrypt(ctr, key);
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo)
    {
        const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Two standard Gaussians (Box-Muller) at a raw address.
    std::array<double, 2> gaussian_pair(StreamTag tag, std::uint64_t major, std::uint32_t minor) const
    {
        const auto r = raw(tag, major, minor);
        const double u1 = to_open_unit(r[0], r[1]);
        const double u2 = to_open_unit(r[2], r[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {rad * std::cos(theta), rad * std::sin(theta)};
    }

    /// Unit Gaussian for base draw `draw` and coordinate `coord`.
    double base_gaussian(std::uint64_t draw, std::size_t coord) const
    {
        const auto pair = gaussian_pair(StreamTag::brownian, draw, static_cast<std::uint32_t>(coord / 2));
        return pair[coord % 2];
    }

    /// Brownian increments B_{(k+1)dt} - B_{k dt} for all coordinates of step k.
    void increments(std::uint64_t step, double dt, std::span<double> out) const
    {
        if (zeroed) {
            std::fill(out.begin(), out.end(), 0.0);
            return;
        }
        const double scale = std::sqrt(dt / refine);
        std::fill(out.begin(), out.end(), 0.0);
        for (std::uint32_t m = 0; m < refine; ++m) {
            const std::uint64_t draw = step * refine + m;
            for (std::size_t c = 0; c < out.size(); c += 2) {
                const auto pair = gaussian_pair(StreamTag::brownian, draw, static_cast<std::uint32_t>(c / 2));
                out[c] += pair[0];
                if (c + 1 < out.size()) {
                    out[c + 1] += pair[1];
                }
            }
        }
        for (double& v : out) {
            v *= scale;
        }
    }

    /// Uniform integer in [0, n) at (tag, major, minor); n must be > 0.
    std::uint64_t uniform_index(StreamTag tag, std::uint64_t major, std::uint32_t minor, std::uint64_t n) const
    {
        const auto r = raw(tag, major, minor);
        const std::uint64_t bits = (std::uint64_t{r[0]} << 32) | r[1];
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
    }

    double uniform(StreamTag tag, std::uint64_t major, std::uint32_t minor) const
    {
        const auto r = raw(tag, major, minor);
        return to_open_unit(r[0], r[1]);
    }
};

}  // namespace dysonqsd
