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

#include "bayermc/synth.hpp"

#include <array>
#include <cmath>
#include <cstdlib>

namespace bayermc::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x632be59bd9b4e019ULL ^
                                                         splitmix64(static_cast<std::uint64_t>(iy))));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

std::int64_t floor_div(std::int64_t a, std::int64_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

double octave(std::uint64_t seed, std::int64_t x, std::int64_t y, int cell) {
    const std::int64_t cx = floor_div(x, cell);
    const std::int64_t cy = floor_div(y, cell);
    const double fx = smooth(static_cast<double>(x - cx * cell) / cell);
    const double fy = smooth(static_cast<double>(y - cy * cell) / cell);
    const double v00 = lattice(seed, cx, cy);
    const double v10 = lattice(seed, cx + 1, cy);
    const double v01 = lattice(seed, cx, cy + 1);
    const double v11 = lattice(seed, cx + 1, cy + 1);
    return (v00 * (1 - fx) + v10 * fx) * (1 - fy) + (v01 * (1 - fx) + v11 * fx) * fy;
}

// Texture planes of one scene: per colour channel for Bayer, single for luma.
std::vector<PixelPlane> texture_channels(int w, int h, std::uint64_t seed, int ox, int oy, bool colour) {
    if (!colour) return {value_noise(w, h, seed, ox, oy)};
    const PixelPlane base = value_noise(w, h, seed, ox, oy);
    std::vector<PixelPlane> out;
    for (std::uint64_t c = 0; c < 3; ++c) {
        const PixelPlane detail = value_noise(w, h, splitmix64(seed + 101 * (c + 1)), ox, oy);
        out.push_back(((base.cast<int>() * 3 + detail.cast<int>() * 2) / 5).cast<std::uint16_t>());
    }
    return out;
}

// Maps [16, 239] onto [lo, lo + 112].
void remap_tone(std::vector<PixelPlane>& channels, int lo) {
    for (auto& c : channels) c = ((c.cast<int>() - 16) / 2 + lo).cast<std::uint16_t>();
}

Frame compose_frame(const std::vector<PixelPlane>& channels, FrameKind kind) {
    if (kind == FrameKind::Luma) return Frame(channels[0], kind, 255);
    return mosaic_rgb(channels[0], channels[1], channels[2], kind, 255);
}

} // namespace

PixelPlane value_noise(int width, int height, std::uint64_t seed, int offset_x, int offset_y) {
    static constexpr std::array<std::pair<int, double>, 4> octaves = {{{32, 0.45}, {16, 0.3}, {8, 0.15}, {4, 0.1}}};
    PixelPlane out(height, width);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double v = 0.0;
            std::uint64_t s = seed;
            for (const auto& [cell, amp] : octaves) {
                v += amp * octave(s, x + offset_x, y + offset_y, cell);
                s = splitmix64(s);
            }
            out(y, x) = static_cast<std::uint16_t>(16 + std::lround(v * 223.0));
        }
    }
    return out;
}

std::pair<int, int> square_origin(const TranslatingScene& scene, int t) {
    const int travel_x = scene.velocity_x * (scene.frames - 1);
    const int travel_y = scene.velocity_y * (scene.frames - 1);
    const int x0 = (scene.width - scene.square_size - travel_x) / 2;
    const int y0 = (scene.height * 3 / 4 - scene.square_size - travel_y) / 2;
    return {x0 + scene.velocity_x * t, y0 + scene.velocity_y * t};
}

Sequence gen_translating_scene(const TranslatingScene& scene) {
    if (scene.width <= 0 || scene.height <= 0 || scene.frames <= 0 || scene.square_size <= 0) {
        throw ConfigError("translating scene: dimensions and frame count must be positive");
    }
    const int travel_x = std::abs(scene.velocity_x) * (scene.frames - 1);
    const int travel_y = std::abs(scene.velocity_y) * (scene.frames - 1);
    if (scene.square_size + travel_x > scene.width || scene.square_size + travel_y > scene.height * 3 / 4) {
        throw ConfigError("translating scene: the square path leaves the frame");
    }
    const bool colour = is_bayer(scene.kind);
    const std::uint64_t bg_seed = splitmix64(scene.seed);
    const std::uint64_t sq_seed = splitmix64(bg_seed);
    const std::uint64_t ground_seed = splitmix64(sq_seed);
    const int ground_y = scene.height * 3 / 4;

    std::vector<PixelPlane> background = texture_channels(scene.width, scene.height, bg_seed, 0, 0, colour);
    const std::vector<PixelPlane> ground =
        texture_channels(scene.width, scene.height - ground_y, ground_seed, 0, ground_y, colour);
    std::vector<PixelPlane> square = texture_channels(scene.square_size, scene.square_size, sq_seed, 0, 0, colour);
    remap_tone(square, 128);
    remap_tone(background, 16);
    for (std::size_t c = 0; c < background.size(); ++c) {
        background[c].bottomRows(scene.height - ground_y) = ground[c];
    }
    ClassPlane base_labels = ClassPlane::Constant(scene.height, scene.width, kBackgroundClass);
    base_labels.bottomRows(scene.height - ground_y).setConstant(kGroundClass);

    Sequence seq;
    for (int t = 0; t < scene.frames; ++t) {
        const auto [sx, sy] = square_origin(scene, t);
        std::vector<PixelPlane> channels = background;
        for (std::size_t c = 0; c < channels.size(); ++c) {
            channels[c].block(sy, sx, scene.square_size, scene.square_size) = square[c];
        }
        ClassPlane labels = base_labels;
        labels.block(sy, sx, scene.square_size, scene.square_size).setConstant(kSquareClass);
        seq.frames.push_back(compose_frame(channels, scene.kind));
        seq.labels.emplace_back(std::move(labels), kNumClasses);
    }
    return seq;
}

Sequence gen_scene_cut(const TranslatingScene& scene, int at_frame, std::uint64_t seed_a, std::uint64_t seed_b) {
    TranslatingScene a = scene;
    a.seed = seed_a;
    TranslatingScene b = scene;
    b.seed = seed_b;
    Sequence sa = gen_translating_scene(a);
    if (at_frame >= scene.frames) return sa;
    Sequence sb = gen_translating_scene(b);
    Sequence out;
    for (int t = 0; t < scene.frames; ++t) {
        const Sequence& src = t < at_frame ? sa : sb;
        out.frames.push_back(src.frames[static_cast<std::size_t>(t)]);
        out.labels.push_back(src.labels[static_cast<std::size_t>(t)]);
    }
    return out;
}

double mean_abs_difference(const Frame& a, const Frame& b) {
    if (a.width() != b.width() || a.height() != b.height()) throw ShapeError("mean_abs_difference: size mismatch");
    return (a.data().cast<double>() - b.data().cast<double>()).abs().mean();
}

} // namespace bayermc::synth
