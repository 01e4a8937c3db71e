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

#include <array>
#include <filesystem>
#include <optional>

#include "bayermc/frame.hpp"

namespace bayermc {

enum class ImageFormat { Pgm, Png };
enum class LabelFormat { Png, RawU8 };

/// Picks the format from the file extension (.pgm or .png).
ImageFormat format_from_path(const std::filesystem::path& path);

/// Loads an 8- or 16-bit single-channel image. The frame kind is not stored
/// in the file and is supplied by the caller.
Frame load_frame(const std::filesystem::path& path, ImageFormat format, FrameKind kind = FrameKind::Luma);
Frame load_frame(const std::filesystem::path& path, FrameKind kind = FrameKind::Luma);

/// PGM keeps max_value as maxval. PNG is written 8-bit when max_value <= 255,
/// otherwise 16-bit (and reads back with max_value 65535).
void save_frame(const Frame& frame, const std::filesystem::path& path, ImageFormat format);
void save_frame(const Frame& frame, const std::filesystem::path& path);

struct RgbImage {
    std::array<PixelPlane, 3> channels;
    std::uint16_t max_value = 255;
};

/// Loads a colour image: binary PPM (P6) or 8/16-bit RGB(A) PNG. Alpha is dropped.
RgbImage load_rgb(const std::filesystem::path& path);
void save_rgb_ppm(const RgbImage& image, const std::filesystem::path& path);

/// Reads class IDs from an 8-bit gray PNG. With no class count the count is
/// inferred as max + 1.
LabelMap load_labels(const std::filesystem::path& path, std::optional<int> num_classes = std::nullopt);
/// Reads headerless row-major bytes.
LabelMap load_labels_raw(const std::filesystem::path& path, int width, int height,
                         std::optional<int> num_classes = std::nullopt);
void save_labels(const LabelMap& labels, const std::filesystem::path& path, LabelFormat format = LabelFormat::Png);

} // namespace bayermc
