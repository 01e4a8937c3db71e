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

#include "bayermc/mv_refine.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "bayermc/parallel.hpp"

namespace bayermc {

MotionVector window_median(const MotionField& field, int bx, int by) {
    std::array<int, 9> xs{};
    std::array<int, 9> ys{};
    int n = 0;
    for (int y = std::max(0, by - 1); y <= std::min(field.grid_h - 1, by + 1); ++y) {
        for (int x = std::max(0, bx - 1); x <= std::min(field.grid_w - 1, bx + 1); ++x) {
            const MotionVector& v = field.mv[field.index(x, y)];
            xs[n] = v.dx;
            ys[n] = v.dy;
            ++n;
        }
    }
    const int mid = (n - 1) / 2;
    std::nth_element(xs.begin(), xs.begin() + mid, xs.begin() + n);
    std::nth_element(ys.begin(), ys.begin() + mid, ys.begin() + n);
    return {xs[mid], ys[mid]};
}

namespace {

// Deviation in full-resolution pixels.
bool is_outlier(MotionVector v, MotionVector median, int scale, int threshold) {
    return scale * std::max(std::abs(v.dx - median.dx), std::abs(v.dy - median.dy)) > threshold;
}

void check_field(const MotionField& field) {
    if (field.size() == 0) throw ShapeError("refine_mvs: empty motion field");
    field.validate();
}

} // namespace

MotionField refine_mvs(const MotionField& field, int deviation_threshold, RefineStats* stats) {
    check_field(field);
    MotionField out = field;
    std::vector<char> replaced(field.size(), 0);
    parallel_for(field.size(), [&](std::size_t i) {
        const int bx = static_cast<int>(i % static_cast<std::size_t>(field.grid_w));
        const int by = static_cast<int>(i / static_cast<std::size_t>(field.grid_w));
        const MotionVector median = window_median(field, bx, by);
        if (is_outlier(field.mv[i], median, field.scale, deviation_threshold)) {
            out.mv[i] = median;
            replaced[i] = 1;
        }
    });
    if (stats) {
        stats->replaced = static_cast<std::size_t>(std::count(replaced.begin(), replaced.end(), 1));
        stats->energy_evaluations = 0;
    }
    return out;
}

MotionField refine_mvs(const MotionField& field, const SearchSurface& cur, const SearchSurface& ref,
                       const FmeConfig& config, int deviation_threshold, RefineStats* stats) {
    check_field(field);
    if (field.scale != cur.scale || field.grid_w * field.block_size > cur.width() * cur.scale ||
        field.grid_h * field.block_size > cur.height() * cur.scale) {
        throw ShapeError("refine_mvs: motion field does not match the search surface");
    }
    const int plane_block = field.block_size / field.scale;
    MotionField out = field;
    std::vector<char> replaced(field.size(), 0);
    parallel_for(field.size(), [&](std::size_t i) {
        const int bx = static_cast<int>(i % static_cast<std::size_t>(field.grid_w));
        const int by = static_cast<int>(i / static_cast<std::size_t>(field.grid_w));
        const MotionVector median = window_median(field, bx, by);
        if (!is_outlier(field.mv[i], median, field.scale, deviation_threshold)) return;
        const auto energy = candidate_energy(cur, ref, bx * plane_block, by * plane_block, plane_block, median, config);
        if (!energy) return;
        const auto e = static_cast<Eigen::Index>(i);
        out.mv[i] = median;
        out.energy[e] = *energy;
        const bool padding_only = bx * field.block_size >= cur.frame_width || by * field.block_size >= cur.frame_height;
        out.matched[e] = padding_only || *energy <= config.refine_block_threshold;
        replaced[i] = 1;
    });
    if (stats) {
        stats->replaced = static_cast<std::size_t>(std::count(replaced.begin(), replaced.end(), 1));
        stats->energy_evaluations = stats->replaced;
    }
    return out;
}

std::uint64_t count_refine_flops(int block_size, std::size_t energy_evaluations) {
    return count_fme_flops(block_size, energy_evaluations);
}

} // namespace bayermc
