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
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "bayermc/error.hpp"

namespace bayermc {

/// Row-major 2D sample plane. Rows are image rows (y), columns are x.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PixelPlane = Plane<std::uint16_t>;
using ClassPlane = Plane<std::uint8_t>;

enum class FrameKind { Luma, BayerRGGB, BayerBGGR, BayerGRBG, BayerGBRG };

constexpr bool is_bayer(FrameKind kind) { return kind != FrameKind::Luma; }

/// Parses "luma", "rggb", "bggr", "grbg", "gbrg" (case-insensitive).
FrameKind parse_frame_kind(std::string_view name);
std::string to_string(FrameKind kind);

/// Colour channel sampled at CFA site (row & 1, col & 1): 0 = R, 1 = G, 2 = B.
int cfa_channel(FrameKind kind, int row_parity, int col_parity);

/// Single-channel intensity frame (luma or raw Bayer mosaic).
///
/// `max_value` is the largest representable sample (255 for 8-bit data,
/// the PGM maxval or 65535 for 16-bit data) and defines intensity
/// normalisation for block energies.
class Frame {
public:
    Frame() = default;
    Frame(PixelPlane data, FrameKind kind, std::uint16_t max_value = 255);

    int width() const { return static_cast<int>(data_.cols()); }
    int height() const { return static_cast<int>(data_.rows()); }
    FrameKind kind() const { return kind_; }
    std::uint16_t max_value() const { return max_value_; }
    bool is_16bit() const { return max_value_ > 255; }

    const PixelPlane& data() const { return data_; }
    std::uint16_t operator()(int y, int x) const { return data_(y, x); }

    bool operator==(const Frame& other) const;

private:
    PixelPlane data_;
    FrameKind kind_ = FrameKind::Luma;
    std::uint16_t max_value_ = 255;
};

/// Four half-resolution planes, one per CFA site, ordered (C00, C01, C10, C11).
struct PackedBayer {
    int width_half = 0;
    int height_half = 0;
    std::array<PixelPlane, 4> planes;
    FrameKind kind = FrameKind::BayerRGGB;
    std::uint16_t max_value = 255;
};

/// Per-pixel class IDs in [0, num_classes).
class LabelMap {
public:
    LabelMap() = default;
    LabelMap(ClassPlane classes, int num_classes);

    /// Uses max(class) + 1 as the class count.
    static LabelMap infer(ClassPlane classes);

    int width() const { return static_cast<int>(classes_.cols()); }
    int height() const { return static_cast<int>(classes_.rows()); }
    int num_classes() const { return num_classes_; }
    const ClassPlane& classes() const { return classes_; }
    std::uint8_t operator()(int y, int x) const { return classes_(y, x); }

    bool operator==(const LabelMap& other) const;

private:
    ClassPlane classes_;
    int num_classes_ = 1;
};

/// Point-samples one of three colour planes per pixel according to the CFA layout.
Frame mosaic_rgb(const PixelPlane& r, const PixelPlane& g, const PixelPlane& b, FrameKind pattern,
                 std::uint16_t max_value = 255);

PackedBayer pack_bayer(const Frame& frame);
Frame unpack_bayer(const PackedBayer& packed);

/// Extends `plane` to (rows, cols) by replicating its last row and column.
template <typename Scalar>
Plane<Scalar> pad_edge(const Plane<Scalar>& plane, Eigen::Index rows, Eigen::Index cols) {
    if (rows < plane.rows() || cols < plane.cols() || plane.size() == 0) {
        throw ShapeError("pad_edge: target smaller than source or empty source");
    }
    Plane<Scalar> out(rows, cols);
    out.topLeftCorner(plane.rows(), plane.cols()) = plane;
    for (Eigen::Index x = plane.cols(); x < cols; ++x) {
        out.col(x).head(plane.rows()) = plane.col(plane.cols() - 1);
    }
    for (Eigen::Index y = plane.rows(); y < rows; ++y) {
        out.row(y) = out.row(plane.rows() - 1);
    }
    return out;
}

/// Smallest multiple of `multiple` that is >= value.
constexpr int round_up(int value, int multiple) { return (value + multiple - 1) / multiple * multiple; }

} // namespace bayermc
