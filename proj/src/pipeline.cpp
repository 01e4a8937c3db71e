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

#include "bayermc/pipeline.hpp"

#include "bayermc/mv_refine.hpp"
#include "bayermc/propagate.hpp"

namespace bayermc {

Pipeline::Pipeline(PipelineConfig config, const CabrWeights* weights)
    : config_(std::move(config)), weights_(weights) {
    config_.validate();
    if (weights_) {
        check_cabr_block_size(config_.fme.block_sizes.back());
        weights_->validate();
    }
}

FrameOutput Pipeline::push(const Frame& frame, const KeyframeProvider& keyframes) {
    const int index = static_cast<int>(frames_);
    SearchSurface surface = make_search_surface(frame, config_.fme.block_sizes.front());
    FrameOutput out;

    if (index == 0) {
        const int top = config_.fme.block_sizes.front();
        auto [decision, state] = open_gop(surface.width() * surface.scale / top, surface.height() * surface.scale / top);
        out.decision = decision;
        aem_ = std::move(state);
    } else {
        const bool from_key = config_.select.reference == ReferencePolicy::LastKey;
        const SearchSurface& ref = from_key ? *key_surface_ : *prev_surface_;
        const FmeResult fme = estimate_motion(surface, ref, config_.fme);
        ledger_.add(Component::Fme, count_fme_flops(config_.fme, fme.evaluations));

        RefineStats stats;
        const MotionField field =
            refine_mvs(fme.final_level(), surface, ref, config_.fme, config_.deviation_threshold, &stats);
        ledger_.add(Component::MvRefine, count_refine_flops(field.block_size, stats.energy_evaluations));
        out.replaced_vectors = stats.replaced;

        auto [decision, state] = decide(aem_, field, config_.select);
        out.decision = decision;
        aem_ = std::move(state);

        if (!decision.is_key()) {
            const LabelMap& ref_labels = from_key ? key_labels_ : prev_labels_;
            LabelMap predicted = predict_labels(ref_labels, field);
            ledger_.add(Component::Prediction, 0);
            const auto blocks = refinement_blocks(field);
            out.flagged_blocks = blocks.size();
            out.labels = refine_blocks(frame, predicted, blocks, weights_);
            if (weights_) {
                ledger_.add(Component::Cabr,
                            count_cabr_flops(field.block_size, weights_->num_classes(), blocks.size()));
            }
        }
    }

    if (out.decision.is_key()) {
        out.labels = keyframes(index);
        if (out.labels.width() != frame.width() || out.labels.height() != frame.height()) {
            throw ShapeError("key frame " + std::to_string(index) + ": labels do not match the frame size");
        }
        if (config_.num_classes && out.labels.num_classes() != *config_.num_classes) {
            out.labels = LabelMap(out.labels.classes(), *config_.num_classes);
        }
        ledger_.add_backbone_frame(config_.backbone_gflops);
        ++keyframes_;
        key_surface_ = surface;
        key_labels_ = out.labels;
    }
    prev_surface_ = std::move(surface);
    prev_labels_ = out.labels;
    ++frames_;
    return out;
}

RunResult run_sequence(std::span<const Frame> frames, const KeyframeProvider& keyframes, const PipelineConfig& config,
                       const CabrWeights* weights, std::span<const LabelMap> truth) {
    if (!truth.empty() && truth.size() != frames.size()) {
        throw ShapeError("run_sequence: truth must hold one label map per frame");
    }
    Pipeline pipeline(config, weights);
    RunResult result;
    double sum_all = 0.0;
    double sum_nonkey = 0.0;
    std::size_t nonkey = 0;
    for (std::size_t t = 0; t < frames.size(); ++t) {
        FrameOutput out = pipeline.push(frames[t], keyframes);
        if (!truth.empty()) {
            const int classes = std::max(out.labels.num_classes(), truth[t].num_classes());
            const double m = miou(out.labels, truth[t], classes, config.ignore_class);
            result.miou.emplace_back(m);
            sum_all += m;
            if (!out.decision.is_key()) {
                sum_nonkey += m;
                ++nonkey;
            }
        }
        result.outputs.push_back(std::move(out));
    }
    result.report.ledger = pipeline.ledger();
    result.report.frames = pipeline.frames();
    result.report.keyframes = pipeline.keyframes();
    result.report.backbone_gflops = config.backbone_gflops;
    if (!truth.empty() && !frames.empty()) {
        result.report.miou_all = sum_all / static_cast<double>(frames.size());
        if (nonkey > 0) result.report.miou_nonkey = sum_nonkey / static_cast<double>(nonkey);
    }
    return result;
}

} // namespace bayermc
