// Copyright 2026 The bayermc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Brute-force reference implementations used only by tests.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <vector>

#include "bayermc/fme.hpp"
#include "bayermc/frame.hpp"

namespace bayermc::oracle {

struct Match {
    MotionVector mv;
    double energy = std::numeric_limits<double>::infinity();
};

// Energy by explicit per-sample loops over every plane.
inline double direct_energy(const SearchSurface& cur, const SearchSurface& ref, int x, int y, int side,
                            MotionVector mv, double lambda, double tolerance) {
    const double max = cur.max_value;
    const std::int64_t limit = static_cast<std::int64_t>(std::floor(tolerance * max + 1e-9));
    std::int64_t sad = 0;
    std::int64_t outliers = 0;
    std::int64_t n = 0;
    for (std::size_t p = 0; p < cur.planes.size(); ++p) {
        for (int r = 0; r < side; ++r) {
            for (int c = 0; c < side; ++c) {
                const std::int64_t a = cur.planes[p](y + r, x + c);
                const std::int64_t b = ref.planes[p](y + mv.dy + r, x + mv.dx + c);
                const std::int64_t d = std::llabs(a - b);
                sad += d;
                outliers += d > limit ? 1 : 0;
                ++n;
            }
        }
    }
    const double nn = static_cast<double>(n);
    return (1.0 - lambda) * (static_cast<double>(sad) / (max * nn)) + lambda * (static_cast<double>(outliers) / nn);
}

// Exhaustive search over [-R, R]^2, dy outer, dx inner; first strict minimum wins.
inline Match full_search(const SearchSurface& cur, const SearchSurface& ref, int x, int y, int side, int R,
                         double lambda, double tolerance) {
    Match best;
    for (int dy = -R; dy <= R; ++dy) {
        for (int dx = -R; dx <= R; ++dx) {
            if (x + dx < 0 || y + dy < 0 || x + dx + side > ref.width() || y + dy + side > ref.height()) continue;
            const double e = direct_energy(cur, ref, x, y, side, {dx, dy}, lambda, tolerance);
            if (e < best.energy) best = {{dx, dy}, e};
        }
    }
    return best;
}

inline PixelPlane random_plane(int width, int height, std::mt19937_64& rng, int max_value = 255) {
    std::uniform_int_distribution<int> dist(0, max_value);
    PixelPlane p(height, width);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = static_cast<std::uint16_t>(dist(rng));
    return p;
}

} // namespace bayermc::oracle
