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

#include "bayermc/cabr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include <json.hpp>

#include "bayermc/parallel.hpp"

namespace bayermc {

namespace {

constexpr int kUpsample = 4;

int conv_out(int in, int kernel, int stride) {
    const int pad = kernel / 2;
    return (in + 2 * pad - kernel) / stride + 1;
}

std::vector<int> weight_shape(const ConvSpec& s) { return {s.out_channels, s.in_channels, s.kernel, s.kernel}; }

std::size_t element_count(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

FeatureMap conv2d(const FeatureMap& in, const ConvSpec& spec, const CabrTensor& weight, const CabrTensor& bias) {
    const int k = spec.kernel;
    const int pad = k / 2;
    const int hout = conv_out(in.height, k, spec.stride);
    const int wout = conv_out(in.width, k, spec.stride);
    const int patch_len = in.channels * k * k;

    Eigen::MatrixXf cols = Eigen::MatrixXf::Zero(patch_len, hout * wout);
    for (int c = 0; c < in.channels; ++c) {
        for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
                const int row = (c * k + ky) * k + kx;
                for (int oy = 0; oy < hout; ++oy) {
                    const int iy = oy * spec.stride + ky - pad;
                    if (iy < 0 || iy >= in.height) continue;
                    for (int ox = 0; ox < wout; ++ox) {
                        const int ix = ox * spec.stride + kx - pad;
                        if (ix < 0 || ix >= in.width) continue;
                        cols(row, oy * wout + ox) = in.at(c, iy, ix);
                    }
                }
            }
        }
    }

    using RowMajorMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const Eigen::Map<const RowMajorMatrix> w(weight.values.data(), spec.out_channels, patch_len);
    const Eigen::Map<const Eigen::VectorXf> b(bias.values.data(), spec.out_channels);

    FeatureMap out;
    out.channels = spec.out_channels;
    out.height = hout;
    out.width = wout;
    out.data.noalias() = w * cols;
    out.data.colwise() += b;
    if (spec.relu) out.data = out.data.cwiseMax(0.0f);
    return out;
}

FeatureMap upsample_nearest(const FeatureMap& in, int factor) {
    FeatureMap out(in.channels, in.height * factor, in.width * factor);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.data.col(y * out.width + x) = in.data.col((y / factor) * in.width + x / factor);
        }
    }
    return out;
}

FeatureMap concat_channels(const FeatureMap& a, const FeatureMap& b) {
    if (a.height != b.height || a.width != b.width) throw ShapeError("cabr: encoder outputs differ in size");
    FeatureMap out;
    out.channels = a.channels + b.channels;
    out.height = a.height;
    out.width = a.width;
    out.data.resize(out.channels, a.height * a.width);
    out.data << a.data, b.data;
    return out;
}

const ConvSpec& layer(const std::vector<ConvSpec>& layers, const std::string& name) {
    for (const auto& l : layers) {
        if (l.name == name) return l;
    }
    throw ShapeError("cabr: no layer named " + name);
}

FeatureMap run(const FeatureMap& in, const std::vector<ConvSpec>& layers, const std::string& name,
               const CabrWeights& w) {
    return conv2d(in, layer(layers, name), w.tensor(name + ".weight"), w.tensor(name + ".bias"));
}

} // namespace

std::vector<ConvSpec> cabr_layers(int num_classes) {
    return {
        {"image_encoder.conv1", 1, 16, 3, 2, true},
        {"image_encoder.conv2", 16, 32, 3, 2, true},
        {"image_encoder.conv3", 32, 32, 3, 1, true},
        {"context_encoder.conv1", num_classes, 16, 3, 2, true},
        {"context_encoder.conv2", 16, 32, 3, 2, true},
        {"context_encoder.conv3", 32, 32, 3, 1, true},
        {"decoder.conv1", 64, 32, 3, 1, true},
        {"decoder.conv2", 32, 32, 3, 1, true},
        {"decoder.head", 32, num_classes, 1, 1, false},
    };
}

CabrWeights::CabrWeights(int num_classes, std::map<std::string, CabrTensor> tensors)
    : num_classes_(num_classes), tensors_(std::move(tensors)) {
    validate();
}

CabrWeights CabrWeights::zeros(int num_classes) {
    std::map<std::string, CabrTensor> tensors;
    for (const auto& l : cabr_layers(num_classes)) {
        const auto ws = weight_shape(l);
        tensors[l.name + ".weight"] = {ws, std::vector<float>(element_count(ws), 0.0f)};
        tensors[l.name + ".bias"] = {{l.out_channels}, std::vector<float>(static_cast<std::size_t>(l.out_channels), 0.0f)};
    }
    return CabrWeights(num_classes, std::move(tensors));
}

CabrWeights CabrWeights::random(int num_classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CabrWeights w = zeros(num_classes);
    for (const auto& l : cabr_layers(num_classes)) {
        auto& t = w.tensors_[l.name + ".weight"];
        const double fan_in = static_cast<double>(l.in_channels) * l.kernel * l.kernel;
        std::uniform_real_distribution<float> dist(-static_cast<float>(std::sqrt(6.0 / fan_in)),
                                                   static_cast<float>(std::sqrt(6.0 / fan_in)));
        for (auto& v : t.values) v = dist(rng);
    }
    return w;
}

const CabrTensor& CabrWeights::tensor(const std::string& name) const {
    const auto it = tensors_.find(name);
    if (it == tensors_.end()) throw ShapeError("cabr weights: missing tensor " + name);
    return it->second;
}

void CabrWeights::validate() const {
    if (num_classes_ < 1 || num_classes_ > 256) throw ShapeError("cabr weights: num_classes must lie in [1, 256]");
    for (const auto& l : cabr_layers(num_classes_)) {
        const auto& w = tensor(l.name + ".weight");
        const auto& b = tensor(l.name + ".bias");
        if (w.shape != weight_shape(l) || w.values.size() != element_count(w.shape)) {
            throw ShapeError("cabr weights: tensor " + l.name + ".weight has the wrong shape");
        }
        if (b.shape != std::vector<int>{l.out_channels} || b.values.size() != static_cast<std::size_t>(l.out_channels)) {
            throw ShapeError("cabr weights: tensor " + l.name + ".bias has the wrong shape");
        }
    }
}

CabrWeights load_cabr_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::array<unsigned char, 4> len_bytes{};
    in.read(reinterpret_cast<char*>(len_bytes.data()), 4);
    if (!in) throw IoError(path.string(), "truncated weight header");
    const std::uint32_t header_len = len_bytes[0] | (len_bytes[1] << 8) | (len_bytes[2] << 16) |
                                     (static_cast<std::uint32_t>(len_bytes[3]) << 24);
    std::string header(header_len, '\0');
    in.read(header.data(), header_len);
    if (!in) throw IoError(path.string(), "truncated weight header");
    std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string(), std::string("malformed weight header: ") + e.what());
    }
    std::map<std::string, CabrTensor> tensors;
    try {
        for (const auto& t : meta.at("tensors")) {
            CabrTensor tensor;
            tensor.shape = t.at("shape").get<std::vector<int>>();
            const auto offset = t.at("offset").get<std::size_t>();
            const std::size_t n = element_count(tensor.shape);
            if (offset % 4 != 0 || offset + n * 4 > payload.size()) {
                throw IoError(path.string(), "tensor " + t.at("name").get<std::string>() + " exceeds the payload");
            }
            tensor.values.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto* p = reinterpret_cast<const unsigned char*>(payload.data() + offset + 4 * i);
                const std::uint32_t bits = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
                std::memcpy(&tensor.values[i], &bits, 4);
            }
            tensors[t.at("name").get<std::string>()] = std::move(tensor);
        }
        return CabrWeights(meta.at("num_classes").get<int>(), std::move(tensors));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string(), std::string("malformed weight header: ") + e.what());
    } catch (const ShapeError& e) {
        throw IoError(path.string(), e.what());
    }
}

void save_cabr_weights(const CabrWeights& weights, const std::filesystem::path& path) {
    nlohmann::json meta;
    meta["format"] = "bayermc-cabr";
    meta["num_classes"] = weights.num_classes();
    meta["tensors"] = nlohmann::json::array();
    std::vector<unsigned char> payload;
    for (const auto& [name, t] : weights.tensors()) {
        meta["tensors"].push_back({{"name", name}, {"shape", t.shape}, {"offset", payload.size()}});
        for (float v : t.values) {
            std::uint32_t bits = 0;
            std::memcpy(&bits, &v, 4);
            for (int b = 0; b < 4; ++b) payload.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xff));
        }
    }
    const std::string header = meta.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    const auto len = static_cast<std::uint32_t>(header.size());
    const std::array<unsigned char, 4> len_bytes = {static_cast<unsigned char>(len & 0xff),
                                                    static_cast<unsigned char>((len >> 8) & 0xff),
                                                    static_cast<unsigned char>((len >> 16) & 0xff),
                                                    static_cast<unsigned char>((len >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(len_bytes.data()), 4);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

void check_cabr_block_size(int block_size) {
    if (block_size < kContextMaskSize) {
        throw ConfigError("CaBR-Net requires block size K >= 16 (the masked 16x16 context centre must fit inside the "
                          "block), got K = " +
                          std::to_string(block_size));
    }
}

CabrPatch extract_patch(const Frame& frame, const LabelMap& labels, int origin_x, int origin_y, int block_size) {
    check_cabr_block_size(block_size);
    if (frame.width() != labels.width() || frame.height() != labels.height()) {
        throw ShapeError("extract_patch: frame and labels differ in size");
    }
    if (origin_x < 0 || origin_y < 0 || origin_x >= frame.width() || origin_y >= frame.height()) {
        throw ShapeError("extract_patch: block origin outside the frame");
    }
    const int side = 2 * block_size + 1;
    const int x0 = origin_x + block_size / 2 - block_size;
    const int y0 = origin_y + block_size / 2 - block_size;
    const float inv_max = 1.0f / static_cast<float>(frame.max_value());

    CabrPatch patch;
    patch.block_size = block_size;
    patch.image = FeatureMap(1, side, side);
    patch.context = FeatureMap(labels.num_classes(), side, side);
    const int mask_lo = block_size - kContextMaskSize / 2;
    const int mask_hi = mask_lo + kContextMaskSize;
    for (int py = 0; py < side; ++py) {
        const int y = std::clamp(y0 + py, 0, frame.height() - 1);
        for (int px = 0; px < side; ++px) {
            const int x = std::clamp(x0 + px, 0, frame.width() - 1);
            patch.image.at(0, py, px) = static_cast<float>(frame(y, x)) * inv_max;
            const bool masked = py >= mask_lo && py < mask_hi && px >= mask_lo && px < mask_hi;
            if (!masked) patch.context.at(labels(y, x), py, px) = 1.0f;
        }
    }
    return patch;
}

FeatureMap cabr_forward(const CabrPatch& patch, const CabrWeights& weights) {
    const int k = patch.block_size;
    check_cabr_block_size(k);
    const int side = 2 * k + 1;
    if (patch.image.channels != 1 || patch.image.height != side || patch.image.width != side) {
        throw ShapeError("cabr_forward: image patch must be 1 x (2K+1) x (2K+1)");
    }
    if (patch.context.channels != weights.num_classes() || patch.context.height != side ||
        patch.context.width != side) {
        throw ShapeError("cabr_forward: context patch does not match the weights' class count");
    }
    const auto layers = cabr_layers(weights.num_classes());
    FeatureMap img = run(patch.image, layers, "image_encoder.conv1", weights);
    img = run(img, layers, "image_encoder.conv2", weights);
    img = run(img, layers, "image_encoder.conv3", weights);
    FeatureMap ctx = run(patch.context, layers, "context_encoder.conv1", weights);
    ctx = run(ctx, layers, "context_encoder.conv2", weights);
    ctx = run(ctx, layers, "context_encoder.conv3", weights);

    FeatureMap x = run(concat_channels(img, ctx), layers, "decoder.conv1", weights);
    x = upsample_nearest(x, kUpsample);
    x = run(x, layers, "decoder.conv2", weights);
    x = run(x, layers, "decoder.head", weights);

    // Upsampled index u lines up with patch index u; the block starts at K/2.
    FeatureMap logits(weights.num_classes(), k, k);
    const int offset = k / 2;
    for (int y = 0; y < k; ++y) {
        for (int xx = 0; xx < k; ++xx) {
            logits.data.col(y * k + xx) = x.data.col((y + offset) * x.width + xx + offset);
        }
    }
    return logits;
}

std::vector<BlockRect> refinement_blocks(const MotionField& field) {
    std::vector<BlockRect> blocks;
    for (std::size_t i : field.unmatched()) {
        blocks.push_back({static_cast<int>(i % static_cast<std::size_t>(field.grid_w)) * field.block_size,
                          static_cast<int>(i / static_cast<std::size_t>(field.grid_w)) * field.block_size,
                          field.block_size});
    }
    return blocks;
}

void fallback_refine_block(const LabelMap& labels, const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& flagged,
                           BlockRect block, ClassPlane& out) {
    const int w = labels.width();
    const int h = labels.height();
    auto usable = [&](int y, int x) { return x >= 0 && y >= 0 && x < w && y < h && !flagged(y, x); };
    const int x_end = std::min(block.x + block.size, w);
    const int y_end = std::min(block.y + block.size, h);
    for (int y = block.y; y < y_end; ++y) {
        for (int x = block.x; x < x_end; ++x) {
            struct Candidate {
                int distance;
                int label;
            };
            std::array<Candidate, 4> cands{};
            int n = 0;
            const int left = block.x - 1, right = block.x + block.size, top = block.y - 1, bottom = block.y + block.size;
            if (usable(y, left)) cands[n++] = {x - left, labels(y, left)};
            if (usable(y, right)) cands[n++] = {right - x, labels(y, right)};
            if (usable(top, x)) cands[n++] = {y - top, labels(top, x)};
            if (usable(bottom, x)) cands[n++] = {bottom - y, labels(bottom, x)};
            if (n == 0) continue;
            int best_distance = cands[0].distance;
            for (int i = 1; i < n; ++i) best_distance = std::min(best_distance, cands[i].distance);
            int best_label = -1;
            int best_votes = 0;
            for (int i = 0; i < n; ++i) {
                if (cands[i].distance != best_distance) continue;
                int votes = 0;
                for (int j = 0; j < n; ++j) votes += cands[j].distance == best_distance && cands[j].label == cands[i].label;
                if (votes > best_votes || (votes == best_votes && cands[i].label < best_label)) {
                    best_votes = votes;
                    best_label = cands[i].label;
                }
            }
            out(y, x) = static_cast<std::uint8_t>(best_label);
        }
    }
}

LabelMap refine_blocks(const Frame& frame, const LabelMap& labels, std::span<const BlockRect> blocks,
                       const CabrWeights* weights) {
    if (frame.width() != labels.width() || frame.height() != labels.height()) {
        throw ShapeError("refine_blocks: frame and labels differ in size");
    }
    ClassPlane out = labels.classes();
    if (blocks.empty()) return LabelMap(std::move(out), labels.num_classes());
    if (weights) {
        weights->validate();
        if (weights->num_classes() != labels.num_classes()) {
            throw ShapeError("refine_blocks: weights expect " + std::to_string(weights->num_classes()) +
                             " classes, labels have " + std::to_string(labels.num_classes()));
        }
    }

    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> flagged =
        Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(labels.height(), labels.width(), false);
    for (const auto& b : blocks) {
        if (b.x < 0 || b.y < 0 || b.size <= 0) throw ShapeError("refine_blocks: invalid block");
        const int bw = std::max(0, std::min(b.size, labels.width() - b.x));
        const int bh = std::max(0, std::min(b.size, labels.height() - b.y));
        if (bw > 0 && bh > 0) flagged.block(b.y, b.x, bh, bw).setConstant(true);
    }

    parallel_for(blocks.size(), [&](std::size_t i) {
        const BlockRect b = blocks[i];
        if (b.x >= labels.width() || b.y >= labels.height()) return;
        if (!weights) {
            fallback_refine_block(labels, flagged, b, out);
            return;
        }
        const FeatureMap logits = cabr_forward(extract_patch(frame, labels, b.x, b.y, b.size), *weights);
        for (int y = 0; y < b.size && b.y + y < labels.height(); ++y) {
            for (int x = 0; x < b.size && b.x + x < labels.width(); ++x) {
                Eigen::Index best = 0;
                logits.data.col(y * b.size + x).maxCoeff(&best);
                out(b.y + y, b.x + x) = static_cast<std::uint8_t>(best);
            }
        }
    });
    return LabelMap(std::move(out), labels.num_classes());
}

std::uint64_t cabr_flops_per_invocation(int block_size, int num_classes) {
    check_cabr_block_size(block_size);
    const auto layers = cabr_layers(num_classes);
    std::uint64_t total = 0;
    const int side = 2 * block_size + 1;
    auto encoder = [&](std::size_t first) {
        int s = side;
        for (std::size_t i = first; i < first + 3; ++i) {
            const auto& l = layers[i];
            s = conv_out(s, l.kernel, l.stride);
            total += conv_flops(l.kernel, l.kernel, l.in_channels, l.out_channels, s, s);
        }
        return s;
    };
    int s = encoder(0);
    encoder(3);
    for (std::size_t i = 6; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (i == 7) s *= kUpsample;
        s = conv_out(s, l.kernel, l.stride);
        total += conv_flops(l.kernel, l.kernel, l.in_channels, l.out_channels, s, s);
    }
    return total;
}

std::uint64_t count_cabr_flops(int block_size, int num_classes, std::size_t invocations) {
    if (invocations == 0) return 0;
    return cabr_flops_per_invocation(block_size, num_classes) * static_cast<std::uint64_t>(invocations);
}

} // namespace bayermc
