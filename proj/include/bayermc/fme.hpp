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

#pragma once

// Fast hierarchical block-matching motion estimation.
//
// Each block of the current frame is searched in the reference frame by three
// chained grid searches (coarse, intermediate, fine), each centred on the best
// candidate of the previous one. Candidates are scored by
//
//     E = (1 - lambda) * SAD_norm + lambda * sparsity
//
// where SAD_norm is the mean absolute difference in [0, 1] and sparsity is the
// fraction of samples whose absolute difference exceeds a tolerance. Blocks
// whose best energy stays above the split threshold are split into four
// children that inherit the parent vector and are searched again at the next
// block size. At the last level, high-energy blocks form the refinement mask.
//
// Motion vectors point from the current block to its match in the reference
// (mv = ref_pos - cur_pos) and are expressed in search-plane samples. Luma
// frames are searched at full resolution (scale 1). Bayer frames are packed
// into four CFA planes and searched at half resolution (scale 2), so every
// candidate keeps the CFA phase. Block sizes are always full-resolution pixels.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "bayermc/error.hpp"
#include "bayermc/frame.hpp"

namespace bayermc {

struct SearchStage {
    int range = 0; ///< steps per direction
    int step = 1;  ///< search-plane samples per step

    bool operator==(const SearchStage&) const = default;
};

struct FmeConfig {
    std::array<SearchStage, 3> stages{{{4, 8}, {2, 4}, {2, 1}}};
    double lambda = 0.1;
    std::vector<int> block_sizes{64, 32};
    double split_threshold = 0.02;
    double sparsity_tolerance = 8.0 / 255.0;
    double refine_block_threshold = 0.05;

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    bool operator==(const FmeConfig&) const = default;
};

/// "standard" and "mode1" .. "mode7".
FmeConfig fme_preset(std::string_view name);
std::vector<std::string> fme_preset_names();

struct MotionVector {
    int dx = 0;
    int dy = 0;

    bool operator==(const MotionVector&) const = default;
};

/// Per-block motion at one hierarchy level. Block i sits at grid position
/// (i % grid_w, i / grid_w) and covers full-resolution pixels starting at
/// (bx * block_size, by * block_size).
struct MotionField {
    int grid_w = 0;
    int grid_h = 0;
    int block_size = 0;
    int scale = 1; ///< full-resolution pixels per motion-vector unit
    std::vector<MotionVector> mv;
    Eigen::ArrayXd energy;
    Eigen::Array<bool, Eigen::Dynamic, 1> matched;

    static MotionField uniform(int grid_w, int grid_h, int block_size, int scale = 1, MotionVector v = {},
                               double energy = 0.0, bool matched = true);

    std::size_t size() const { return mv.size(); }
    std::size_t index(int bx, int by) const { return static_cast<std::size_t>(by) * grid_w + bx; }

    /// Indices of unmatched blocks, ascending.
    std::vector<std::size_t> unmatched() const;

    void validate() const;

    bool operator==(const MotionField& other) const;
};

/// Planes searched by block matching: one luma plane or four packed CFA
/// planes, edge-padded to a multiple of the largest block size.
struct SearchSurface {
    std::vector<PixelPlane> planes;
    int scale = 1;
    std::uint16_t max_value = 255;
    int frame_width = 0;  ///< unpadded, full resolution
    int frame_height = 0; ///< unpadded, full resolution
    FrameKind kind = FrameKind::Luma;

    int width() const { return static_cast<int>(planes.front().cols()); }
    int height() const { return static_cast<int>(planes.front().rows()); }
};

/// `pad_multiple` is in full-resolution pixels and must be a multiple of the scale.
SearchSurface make_search_surface(const Frame& frame, int pad_multiple = 1);

/// Integer tallies behind one block energy.
struct BlockCost {
    std::int64_t sad = 0;
    std::int64_t outliers = 0;
    std::int64_t samples = 0;

    BlockCost& operator+=(const BlockCost& o) {
        sad += o.sad;
        outliers += o.outliers;
        samples += o.samples;
        return *this;
    }
};

/// Largest integer difference that does not count towards sparsity.
inline int outlier_threshold(double sparsity_tolerance, std::uint16_t max_value) {
    return static_cast<int>(std::floor(sparsity_tolerance * max_value + 1e-9));
}

template <typename DerivedA, typename DerivedB>
BlockCost block_cost(const Eigen::ArrayBase<DerivedA>& cur, const Eigen::ArrayBase<DerivedB>& ref, int threshold) {
    const auto diff = (cur.template cast<int>() - ref.template cast<int>()).abs();
    BlockCost cost;
    cost.sad = diff.template cast<std::int64_t>().sum();
    cost.outliers = static_cast<std::int64_t>((diff > threshold).count());
    cost.samples = cur.size();
    return cost;
}

inline double energy_from_cost(const BlockCost& cost, std::uint16_t max_value, double lambda) {
    if (cost.samples == 0) return 0.0;
    const double n = static_cast<double>(cost.samples);
    const double sad_norm = static_cast<double>(cost.sad) / (static_cast<double>(max_value) * n);
    const double sparsity = static_cast<double>(cost.outliers) / n;
    return (1.0 - lambda) * sad_norm + lambda * sparsity;
}

/// Energy in [0, 1] of two equally sized sample windows.
template <typename DerivedA, typename DerivedB>
double block_energy(const Eigen::ArrayBase<DerivedA>& cur, const Eigen::ArrayBase<DerivedB>& ref, double lambda,
                    double sparsity_tolerance, std::uint16_t max_value = 255) {
    if (cur.rows() != ref.rows() || cur.cols() != ref.cols()) {
        throw ShapeError("block_energy: block sizes differ");
    }
    return energy_from_cost(block_cost(cur, ref, outlier_threshold(sparsity_tolerance, max_value)), max_value,
                            lambda);
}

/// Energy of the block at plane origin (x, y) of side `plane_block` displaced
/// by `mv`, or nullopt when the reference window leaves the surface.
std::optional<double> candidate_energy(const SearchSurface& cur, const SearchSurface& ref, int x, int y,
                                       int plane_block, MotionVector mv, const FmeConfig& config);

struct StageResult {
    MotionVector mv;
    double energy = 0.0;
    std::size_t evaluations = 0;
};

/// Scans {center + (i*step, j*step) : i, j in [-range, range]} row-major over
/// (j, i) and returns the first candidate with the lowest energy. Windows
/// leaving the reference are skipped. `origin_x/y` and `block_size` are
/// full-resolution pixels.
StageResult search_stage(const SearchSurface& cur, const SearchSurface& ref, int origin_x, int origin_y,
                         int block_size, MotionVector center, SearchStage stage, const FmeConfig& config);

/// Runs the three stages chained from `start`.
StageResult search_block(const SearchSurface& cur, const SearchSurface& ref, int origin_x, int origin_y,
                         int block_size, MotionVector start, const FmeConfig& config);

struct FmeResult {
    std::vector<MotionField> levels;        ///< one per block size
    std::vector<std::size_t> evaluations;   ///< candidate evaluations per level

    const MotionField& final_level() const { return levels.back(); }
};

FmeResult estimate_motion(const Frame& cur, const Frame& ref, const FmeConfig& config);
FmeResult estimate_motion(const SearchSurface& cur, const SearchSurface& ref, const FmeConfig& config);

/// Flops of one candidate evaluation for a block of `block_size` full-resolution
/// pixels: 2 per sample for |difference| and accumulate, 1 per sample for the
/// sparsity comparison, 3 to combine the terms.
constexpr std::uint64_t candidate_flops(int block_size) {
    const auto n = static_cast<std::uint64_t>(block_size) * static_cast<std::uint64_t>(block_size);
    return 3 * n + 3;
}

std::uint64_t count_fme_flops(int block_size, std::size_t evaluations);
/// `evaluations[l]` is the candidate count at level l (block_sizes[l]).
std::uint64_t count_fme_flops(const FmeConfig& config, std::span<const std::size_t> evaluations);

} // namespace bayermc
