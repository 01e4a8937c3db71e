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

#include "bayermc/frame.hpp"

#include <algorithm>
#include <cctype>

namespace bayermc {

FrameKind parse_frame_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "luma") return FrameKind::Luma;
    if (lower == "rggb") return FrameKind::BayerRGGB;
    if (lower == "bggr") return FrameKind::BayerBGGR;
    if (lower == "grbg") return FrameKind::BayerGRBG;
    if (lower == "gbrg") return FrameKind::BayerGBRG;
    throw ConfigError("unknown frame pattern '" + std::string(name) + "'");
}

std::string to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::Luma: return "luma";
        case FrameKind::BayerRGGB: return "rggb";
        case FrameKind::BayerBGGR: return "bggr";
        case FrameKind::BayerGRBG: return "grbg";
        case FrameKind::BayerGBRG: return "gbrg";
    }
    return "unknown";
}

int cfa_channel(FrameKind kind, int row_parity, int col_parity) {
    // Layout strings read C00 C01 C10 C11.
    static constexpr std::array<std::array<int, 4>, 4> layouts = {{
        {0, 1, 1, 2}, // RGGB
        {2, 1, 1, 0}, // BGGR
        {1, 0, 2, 1}, // GRBG
        {1, 2, 0, 1}, // GBRG
    }};
    if (!is_bayer(kind)) {
        throw ShapeError("cfa_channel: luma frames have no CFA layout");
    }
    const auto& layout = layouts[static_cast<int>(kind) - 1];
    return layout[(row_parity & 1) * 2 + (col_parity & 1)];
}

Frame::Frame(PixelPlane data, FrameKind kind, std::uint16_t max_value)
    : data_(std::move(data)), kind_(kind), max_value_(max_value) {
    if (max_value_ == 0) {
        throw ShapeError("frame max_value must be positive");
    }
    if (is_bayer(kind_) && (data_.rows() % 2 != 0 || data_.cols() % 2 != 0)) {
        throw ShapeError("Bayer frames require even width and height, got " +
                         std::to_string(data_.cols()) + "x" + std::to_string(data_.rows()));
    }
    if (data_.size() > 0 && data_.maxCoeff() > max_value_) {
        throw ShapeError("frame sample exceeds max_value " + std::to_string(max_value_));
    }
}

bool Frame::operator==(const Frame& other) const {
    return kind_ == other.kind_ && max_value_ == other.max_value_ && data_.rows() == other.data_.rows() &&
           data_.cols() == other.data_.cols() && (data_ == other.data_).all();
}

LabelMap::LabelMap(ClassPlane classes, int num_classes) : classes_(std::move(classes)), num_classes_(num_classes) {
    if (num_classes_ < 1 || num_classes_ > 256) {
        throw ShapeError("num_classes must be in [1, 256], got " + std::to_string(num_classes_));
    }
    if (classes_.size() > 0 && classes_.maxCoeff() >= num_classes_) {
        throw ShapeError("class id " + std::to_string(classes_.maxCoeff()) + " >= num_classes " +
                         std::to_string(num_classes_));
    }
}

LabelMap LabelMap::infer(ClassPlane classes) {
    const int n = classes.size() > 0 ? classes.maxCoeff() + 1 : 1;
    return LabelMap(std::move(classes), n);
}

bool LabelMap::operator==(const LabelMap& other) const {
    return num_classes_ == other.num_classes_ && classes_.rows() == other.classes_.rows() &&
           classes_.cols() == other.classes_.cols() && (classes_ == other.classes_).all();
}

Frame mosaic_rgb(const PixelPlane& r, const PixelPlane& g, const PixelPlane& b, FrameKind pattern,
                 std::uint16_t max_value) {
    if (!is_bayer(pattern)) {
        throw ShapeError("mosaic_rgb: pattern must be a Bayer layout");
    }
    if (r.rows() != g.rows() || r.rows() != b.rows() || r.cols() != g.cols() || r.cols() != b.cols()) {
        throw ShapeError("mosaic_rgb: colour planes differ in size");
    }
    if (r.rows() % 2 != 0 || r.cols() % 2 != 0) {
        throw ShapeError("mosaic_rgb: odd dimensions");
    }
    const std::array<const PixelPlane*, 3> rgb = {&r, &g, &b};
    PixelPlane out(r.rows(), r.cols());
    for (Eigen::Index y = 0; y < out.rows(); ++y) {
        for (Eigen::Index x = 0; x < out.cols(); ++x) {
            out(y, x) = (*rgb[cfa_channel(pattern, static_cast<int>(y), static_cast<int>(x))])(y, x);
        }
    }
    return Frame(std::move(out), pattern, max_value);
}

PackedBayer pack_bayer(const Frame& frame) {
    if (!is_bayer(frame.kind())) {
        throw ShapeError("pack_bayer: frame is luma, expected a Bayer kind");
    }
    PackedBayer packed;
    packed.width_half = frame.width() / 2;
    packed.height_half = frame.height() / 2;
    packed.kind = frame.kind();
    packed.max_value = frame.max_value();
    const auto& data = frame.data();
    for (int k = 0; k < 4; ++k) {
        packed.planes[k] = data(Eigen::seqN(k / 2, packed.height_half, 2), Eigen::seqN(k % 2, packed.width_half, 2));
    }
    return packed;
}

Frame unpack_bayer(const PackedBayer& packed) {
    PixelPlane data(packed.height_half * 2, packed.width_half * 2);
    for (int k = 0; k < 4; ++k) {
        const auto& p = packed.planes[k];
        if (p.rows() != packed.height_half || p.cols() != packed.width_half) {
            throw ShapeError("unpack_bayer: plane " + std::to_string(k) + " has wrong size");
        }
        data(Eigen::seqN(k / 2, packed.height_half, 2), Eigen::seqN(k % 2, packed.width_half, 2)) = p;
    }
    return Frame(std::move(data), packed.kind, packed.max_value);
}

} // namespace bayermc
