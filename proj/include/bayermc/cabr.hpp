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

// Context-aware block refinement network (forward inference only).
//
// A flagged K x K block is cut out together with its surroundings as a
// (2K+1) x (2K+1) image patch and a one-hot context patch of the predicted
// labels whose central 16 x 16 area is zeroed. Two encoders map the patches
// to features, which are concatenated along channels and decoded into
// per-pixel class logits over the block:
//
//   image:   conv3x3(1->16, s2) conv3x3(16->32, s2) conv3x3(32->32)
//   context: conv3x3(C->16, s2) conv3x3(16->32, s2) conv3x3(32->32)
//   decoder: conv3x3(64->32) upsample x4 conv3x3(32->32) conv1x1(32->C)
//
// All 3x3 convolutions use zero padding 1 and are followed by ReLU.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bayermc/frame.hpp"
#include "bayermc/fme.hpp"

namespace bayermc {

inline constexpr int kContextMaskSize = 16;

/// Channel-major activations: data(c, y * width + x).
struct FeatureMap {
    int channels = 0;
    int height = 0;
    int width = 0;
    Eigen::MatrixXf data;

    FeatureMap() = default;
    FeatureMap(int c, int h, int w) : channels(c), height(h), width(w), data(Eigen::MatrixXf::Zero(c, h * w)) {}

    float& at(int c, int y, int x) { return data(c, y * width + x); }
    float at(int c, int y, int x) const { return data(c, y * width + x); }
};

struct CabrPatch {
    int block_size = 0;  ///< K
    FeatureMap image;    ///< 1 x (2K+1) x (2K+1), intensities in [0, 1]
    FeatureMap context;  ///< C x (2K+1) x (2K+1), one-hot with the centre masked
};

struct ConvSpec {
    std::string name;
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 3;
    int stride = 1;
    bool relu = true;
};

/// Layers in evaluation order: image encoder, context encoder, decoder.
std::vector<ConvSpec> cabr_layers(int num_classes);

struct CabrTensor {
    std::vector<int> shape;
    std::vector<float> values;
};

class CabrWeights {
public:
    CabrWeights() = default;
    CabrWeights(int num_classes, std::map<std::string, CabrTensor> tensors);

    static CabrWeights zeros(int num_classes);
    /// He-uniform weights, zero biases.
    static CabrWeights random(int num_classes, std::uint64_t seed);

    int num_classes() const { return num_classes_; }
    const std::map<std::string, CabrTensor>& tensors() const { return tensors_; }
    const CabrTensor& tensor(const std::string& name) const;

    /// Throws ShapeError unless every layer's weight and bias tensors exist
    /// with the shapes implied by cabr_layers().
    void validate() const;

private:
    int num_classes_ = 0;
    std::map<std::string, CabrTensor> tensors_;
};

/// File layout: <u32 LE header length><JSON header><f32 LE payload>. The header
/// lists {name, shape, offset} per tensor, offsets in bytes from payload start.
CabrWeights load_cabr_weights(const std::filesystem::path& path);
void save_cabr_weights(const CabrWeights& weights, const std::filesystem::path& path);

/// Throws ConfigError when K < 16 (the masked context centre would not fit).
void check_cabr_block_size(int block_size);

/// Patch around the block at full-resolution origin (x, y). Out-of-frame
/// samples are edge-replicated.
CabrPatch extract_patch(const Frame& frame, const LabelMap& labels, int origin_x, int origin_y, int block_size);

/// Logits of shape (num_classes, K, K).
FeatureMap cabr_forward(const CabrPatch& patch, const CabrWeights& weights);

struct BlockRect {
    int x = 0;
    int y = 0;
    int size = 0;

    bool operator==(const BlockRect&) const = default;
};

/// Unmatched (flagged) blocks of a final-level field, in grid order.
std::vector<BlockRect> refinement_blocks(const MotionField& field);

/// Replaces the labels of each flagged block, by argmax of the network
/// logits when `weights` is given, otherwise by the ring fallback. Pixels
/// outside flagged blocks are copied unchanged.
LabelMap refine_blocks(const Frame& frame, const LabelMap& labels, std::span<const BlockRect> blocks,
                       const CabrWeights* weights);

/// Fallback refiner: every pixel takes the label of its nearest projection
/// onto the one-pixel ring around the block, skipping ring pixels outside the
/// frame or inside flagged blocks. Distance ties go to the most frequent
/// label, then the smallest class id.
void fallback_refine_block(const LabelMap& labels, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& flagged,
                           BlockRect block, ClassPlane& out);

constexpr std::uint64_t conv_flops(int kh, int kw, int cin, int cout, int hout, int wout) {
    return 2ULL * static_cast<std::uint64_t>(kh) * kw * cin * cout * hout * wout;
}

/// Flops of one forward pass for block size K.
std::uint64_t cabr_flops_per_invocation(int block_size, int num_classes);
std::uint64_t count_cabr_flops(int block_size, int num_classes, std::size_t invocations);

} // namespace bayermc
