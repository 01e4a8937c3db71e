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

#include "bayermc/fme.hpp"

#include <limits>

#include "bayermc/parallel.hpp"

namespace bayermc {

void FmeConfig::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("fme: lambda must lie in [0, 1]");
    for (double t : {split_threshold, sparsity_tolerance, refine_block_threshold}) {
        if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("fme: thresholds and tolerance must lie in [0, 1]");
    }
    for (const auto& s : stages) {
        if (s.range < 0 || s.step < 1) throw ConfigError("fme: stage range must be >= 0 and step >= 1");
    }
    if (block_sizes.empty()) throw ConfigError("fme: block_sizes is empty");
    for (std::size_t i = 0; i < block_sizes.size(); ++i) {
        const int b = block_sizes[i];
        if (b < 8 || (b & (b - 1)) != 0) {
            throw ConfigError("fme: block sizes must be powers of two >= 8, got " + std::to_string(b));
        }
        if (i > 0 && block_sizes[i - 1] != 2 * b) {
            throw ConfigError("fme: each block size must halve the previous one");
        }
    }
}

FmeConfig fme_preset(std::string_view name) {
    FmeConfig c;
    if (name == "standard") return c;
    if (name == "mode1") {
        c.stages = {{{6, 8}, {4, 4}, {4, 1}}};
    } else if (name == "mode2") {
        c.stages = {{{10, 8}, {6, 4}, {4, 4}}};
    } else if (name == "mode3") {
        c.block_sizes = {32};
    } else if (name == "mode4") {
        c.block_sizes = {64, 32, 16, 8};
    } else if (name == "mode5") {
        c.stages[0].step = 16;
    } else if (name == "mode6") {
        c.lambda = 0.5;
    } else if (name == "mode7") {
        c.lambda = 0.8;
    } else {
        throw ConfigError("unknown FME preset '" + std::string(name) + "'");
    }
    return c;
}

std::vector<std::string> fme_preset_names() {
    return {"standard", "mode1", "mode2", "mode3", "mode4", "mode5", "mode6", "mode7"};
}

MotionField MotionField::uniform(int grid_w, int grid_h, int block_size, int scale, MotionVector v, double e,
                                 bool m) {
    MotionField f;
    f.grid_w = grid_w;
    f.grid_h = grid_h;
    f.block_size = block_size;
    f.scale = scale;
    const auto n = static_cast<std::size_t>(grid_w) * grid_h;
    f.mv.assign(n, v);
    f.energy = Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(n), e);
    f.matched = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(static_cast<Eigen::Index>(n), m);
    return f;
}

std::vector<std::size_t> MotionField::unmatched() const {
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < matched.size(); ++i) {
        if (!matched[i]) out.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

void MotionField::validate() const {
    if (grid_w <= 0 || grid_h <= 0 || block_size <= 0) throw ShapeError("motion field: empty grid");
    if (scale != 1 && scale != 2) throw ShapeError("motion field: scale must be 1 or 2");
    const auto n = static_cast<std::size_t>(grid_w) * grid_h;
    if (mv.size() != n || static_cast<std::size_t>(energy.size()) != n ||
        static_cast<std::size_t>(matched.size()) != n) {
        throw ShapeError("motion field: array lengths differ from grid_w * grid_h");
    }
    if (n > 0 && (energy.minCoeff() < 0.0 || energy.maxCoeff() > 1.0)) {
        throw ShapeError("motion field: energy outside [0, 1]");
    }
}

bool MotionField::operator==(const MotionField& o) const {
    return grid_w == o.grid_w && grid_h == o.grid_h && block_size == o.block_size && scale == o.scale &&
           mv == o.mv && energy.size() == o.energy.size() && (energy == o.energy).all() &&
           matched.size() == o.matched.size() && (matched == o.matched).all();
}

SearchSurface make_search_surface(const Frame& frame, int pad_multiple) {
    SearchSurface s;
    s.kind = frame.kind();
    s.scale = is_bayer(frame.kind()) ? 2 : 1;
    s.max_value = frame.max_value();
    s.frame_width = frame.width();
    s.frame_height = frame.height();
    if (frame.width() == 0 || frame.height() == 0) throw ShapeError("search surface: empty frame");
    if (pad_multiple < 1 || pad_multiple % s.scale != 0) {
        throw ShapeError("search surface: pad multiple must be a positive multiple of the CFA scale");
    }
    const int plane_multiple = pad_multiple / s.scale;
    auto pad = [&](const PixelPlane& p) {
        return pad_edge(p, round_up(static_cast<int>(p.rows()), plane_multiple),
                        round_up(static_cast<int>(p.cols()), plane_multiple));
    };
    if (s.scale == 1) {
        s.planes.push_back(pad(frame.data()));
    } else {
        const PackedBayer packed = pack_bayer(frame);
        for (const auto& p : packed.planes) s.planes.push_back(pad(p));
    }
    return s;
}

namespace {

void check_compatible(const SearchSurface& cur, const SearchSurface& ref) {
    if (cur.planes.empty() || ref.planes.empty()) throw ShapeError("search surface has no planes");
    if (cur.kind != ref.kind || cur.scale != ref.scale || cur.planes.size() != ref.planes.size()) {
        throw ShapeError("current and reference frames differ in kind");
    }
    if (cur.width() != ref.width() || cur.height() != ref.height() || cur.frame_width != ref.frame_width ||
        cur.frame_height != ref.frame_height) {
        throw ShapeError("current and reference frames differ in size");
    }
    if (cur.max_value != ref.max_value) throw ShapeError("current and reference frames differ in bit depth");
}

// Cost of the block at plane origin (x, y) displaced by mv; caller guarantees bounds.
BlockCost displaced_cost(const SearchSurface& cur, const SearchSurface& ref, int x, int y, int b, MotionVector mv,
                         int threshold) {
    BlockCost total;
    for (std::size_t p = 0; p < cur.planes.size(); ++p) {
        total += block_cost(cur.planes[p].block(y, x, b, b), ref.planes[p].block(y + mv.dy, x + mv.dx, b, b),
                            threshold);
    }
    return total;
}

bool window_inside(const SearchSurface& ref, int x, int y, int b, MotionVector mv) {
    const int rx = x + mv.dx;
    const int ry = y + mv.dy;
    return rx >= 0 && ry >= 0 && rx + b <= ref.width() && ry + b <= ref.height();
}

int plane_block_size(const SearchSurface& s, int block_size) {
    if (block_size % s.scale != 0) throw ShapeError("block size is not a multiple of the CFA scale");
    return block_size / s.scale;
}

} // namespace

std::optional<double> candidate_energy(const SearchSurface& cur, const SearchSurface& ref, int x, int y,
                                       int plane_block, MotionVector mv, const FmeConfig& config) {
    if (x < 0 || y < 0 || x + plane_block > cur.width() || y + plane_block > cur.height()) {
        throw ShapeError("candidate_energy: block outside the current frame");
    }
    if (!window_inside(ref, x, y, plane_block, mv)) return std::nullopt;
    const BlockCost cost =
        displaced_cost(cur, ref, x, y, plane_block, mv, outlier_threshold(config.sparsity_tolerance, cur.max_value));
    return energy_from_cost(cost, cur.max_value, config.lambda);
}

StageResult search_stage(const SearchSurface& cur, const SearchSurface& ref, int origin_x, int origin_y,
                         int block_size, MotionVector center, SearchStage stage, const FmeConfig& config) {
    check_compatible(cur, ref);
    const int b = plane_block_size(cur, block_size);
    if (origin_x % cur.scale != 0 || origin_y % cur.scale != 0) {
        throw ShapeError("search_stage: block origin breaks the CFA phase");
    }
    const int x = origin_x / cur.scale;
    const int y = origin_y / cur.scale;
    if (x < 0 || y < 0 || x + b > cur.width() || y + b > cur.height()) {
        throw ShapeError("search_stage: block lies outside the frame");
    }
    const int threshold = outlier_threshold(config.sparsity_tolerance, cur.max_value);

    StageResult best;
    best.energy = std::numeric_limits<double>::infinity();
    for (int j = -stage.range; j <= stage.range; ++j) {
        for (int i = -stage.range; i <= stage.range; ++i) {
            const MotionVector mv{center.dx + i * stage.step, center.dy + j * stage.step};
            if (!window_inside(ref, x, y, b, mv)) continue;
            const double e = energy_from_cost(displaced_cost(cur, ref, x, y, b, mv, threshold), cur.max_value,
                                              config.lambda);
            ++best.evaluations;
            if (e < best.energy) {
                best.energy = e;
                best.mv = mv;
            }
        }
    }
    if (best.evaluations == 0) {
        throw ShapeError("search_stage: every candidate window leaves the reference frame");
    }
    return best;
}

StageResult search_block(const SearchSurface& cur, const SearchSurface& ref, int origin_x, int origin_y,
                         int block_size, MotionVector start, const FmeConfig& config) {
    StageResult result;
    result.mv = start;
    std::size_t evaluations = 0;
    for (const auto& stage : config.stages) {
        result = search_stage(cur, ref, origin_x, origin_y, block_size, result.mv, stage, config);
        evaluations += result.evaluations;
    }
    result.evaluations = evaluations;
    return result;
}

FmeResult estimate_motion(const Frame& cur, const Frame& ref, const FmeConfig& config) {
    config.validate();
    if (cur.kind() != ref.kind()) throw ShapeError("estimate_motion: frame kinds differ");
    if (cur.width() != ref.width() || cur.height() != ref.height()) {
        throw ShapeError("estimate_motion: frame sizes differ");
    }
    const int pad = config.block_sizes.front();
    return estimate_motion(make_search_surface(cur, pad), make_search_surface(ref, pad), config);
}

FmeResult estimate_motion(const SearchSurface& cur, const SearchSurface& ref, const FmeConfig& config) {
    config.validate();
    check_compatible(cur, ref);
    const int top = config.block_sizes.front();
    const int padded_w = cur.width() * cur.scale;
    const int padded_h = cur.height() * cur.scale;
    if (padded_w % top != 0 || padded_h % top != 0) {
        throw ShapeError("estimate_motion: surface is not padded to the largest block size");
    }

    FmeResult result;
    std::vector<std::size_t> active;
    for (std::size_t level = 0; level < config.block_sizes.size(); ++level) {
        const int bs = config.block_sizes[level];
        const bool final_level = level + 1 == config.block_sizes.size();
        MotionField field;
        if (level == 0) {
            field = MotionField::uniform(padded_w / bs, padded_h / bs, bs, cur.scale, {}, 0.0, false);
            active.resize(field.size());
            for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;
        } else {
            // Children replicate the parent's vector, energy and mask over a 2x2 grid.
            const MotionField& parent = result.levels.back();
            field = MotionField::uniform(parent.grid_w * 2, parent.grid_h * 2, bs, cur.scale);
            active.clear();
            for (int by = 0; by < field.grid_h; ++by) {
                for (int bx = 0; bx < field.grid_w; ++bx) {
                    const std::size_t i = field.index(bx, by);
                    const std::size_t p = parent.index(bx / 2, by / 2);
                    field.mv[i] = parent.mv[p];
                    field.energy[static_cast<Eigen::Index>(i)] = parent.energy[static_cast<Eigen::Index>(p)];
                    field.matched[static_cast<Eigen::Index>(i)] = parent.matched[static_cast<Eigen::Index>(p)];
                    if (!parent.matched[static_cast<Eigen::Index>(p)]) active.push_back(i);
                }
            }
        }

        std::vector<std::size_t> evaluations(active.size(), 0);
        const double threshold = final_level ? config.refine_block_threshold : config.split_threshold;
        parallel_for(active.size(), [&](std::size_t k) {
            const std::size_t i = active[k];
            const int ox = static_cast<int>(i % static_cast<std::size_t>(field.grid_w)) * bs;
            const int oy = static_cast<int>(i / static_cast<std::size_t>(field.grid_w)) * bs;
            const StageResult r = search_block(cur, ref, ox, oy, bs, field.mv[i], config);
            const auto e = static_cast<Eigen::Index>(i);
            field.mv[i] = r.mv;
            field.energy[e] = r.energy;
            bool matched = r.energy <= threshold;
            // Blocks made only of padding never enter the refinement mask.
            if (final_level && (ox >= cur.frame_width || oy >= cur.frame_height)) matched = true;
            field.matched[e] = matched;
            evaluations[k] = r.evaluations;
        });
        if (final_level && level > 0) {
            for (int by = 0; by < field.grid_h; ++by) {
                for (int bx = 0; bx < field.grid_w; ++bx) {
                    const auto e = static_cast<Eigen::Index>(field.index(bx, by));
                    const bool padding = bx * bs >= cur.frame_width || by * bs >= cur.frame_height;
                    field.matched[e] = padding || field.energy[e] <= config.refine_block_threshold;
                }
            }
        }
        std::size_t total = 0;
        for (auto v : evaluations) total += v;
        result.evaluations.push_back(total);
        result.levels.push_back(std::move(field));
    }
    return result;
}

std::uint64_t count_fme_flops(int block_size, std::size_t evaluations) {
    return candidate_flops(block_size) * static_cast<std::uint64_t>(evaluations);
}

std::uint64_t count_fme_flops(const FmeConfig& config, std::span<const std::size_t> evaluations) {
    if (evaluations.size() > config.block_sizes.size()) {
        throw ShapeError("count_fme_flops: more evaluation counts than hierarchy levels");
    }
    std::uint64_t total = 0;
    for (std::size_t l = 0; l < evaluations.size(); ++l) total += count_fme_flops(config.block_sizes[l], evaluations[l]);
    return total;
}

} // namespace bayermc
