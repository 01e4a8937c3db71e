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

// Seeded synthetic sequences with exact ground truth.

#include <cstdint>
#include <vector>

#include "bayermc/frame.hpp"

namespace bayermc::synth {

inline constexpr std::uint8_t kBackgroundClass = 0;
inline constexpr std::uint8_t kSquareClass = 1;
inline constexpr std::uint8_t kGroundClass = 2;
inline constexpr int kNumClasses = 3;

/// Multi-octave value noise sampled on the infinite integer lattice, so a
/// window at (offset_x, offset_y) is the same texture translated. Values are
/// 8-bit in [16, 239].
PixelPlane value_noise(int width, int height, std::uint64_t seed, int offset_x = 0, int offset_y = 0);

struct Sequence {
    std::vector<Frame> frames;
    std::vector<LabelMap> labels;
};

struct TranslatingScene {
    int width = 256;
    int height = 256;
    int frames = 10;
    int velocity_x = 0; ///< pixels per frame
    int velocity_y = 0;
    int square_size = 64;
    std::uint64_t seed = 1;
    FrameKind kind = FrameKind::Luma;
};

/// Top-left corner of the square at frame t. The path is centred in the frame.
std::pair<int, int> square_origin(const TranslatingScene& scene, int t);

/// Textured square (class 1) translating over a static background (class 0)
/// with a static ground band (class 2) in the bottom quarter. The square
/// texture moves with the square. Bayer kinds mosaic three channel textures.
Sequence gen_translating_scene(const TranslatingScene& scene);

/// Frames [0, at_frame) come from a scene seeded with `seed_a`, the rest from
/// an unrelated scene seeded with `seed_b`.
Sequence gen_scene_cut(const TranslatingScene& scene, int at_frame, std::uint64_t seed_a, std::uint64_t seed_b);

/// Mean absolute sample difference of two equally sized frames.
double mean_abs_difference(const Frame& a, const Frame& b);

} // namespace bayermc::synth
