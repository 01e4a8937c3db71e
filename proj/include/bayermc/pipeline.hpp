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

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "bayermc/cabr.hpp"
#include "bayermc/config.hpp"
#include "bayermc/fme.hpp"
#include "bayermc/frame_select.hpp"
#include "bayermc/metrics.hpp"
#include "bayermc/serialize.hpp"

namespace bayermc {

/// Supplies the result map of a key frame (stands in for the backbone).
using KeyframeProvider = std::function<LabelMap(int frame_index)>;

struct FrameOutput {
    FrameDecision decision;
    LabelMap labels;
    std::size_t flagged_blocks = 0;
    std::size_t replaced_vectors = 0;
};

/// Sequential GOP driver. Per frame after the first: motion estimation
/// against the reference, vector refinement, keyframe decision, then either
/// the provider's key result or motion-compensated prediction followed by
/// block refinement.
class Pipeline {
public:
    /// `weights` may be null (ring fallback refiner); otherwise it must
    /// outlive the pipeline.
    explicit Pipeline(PipelineConfig config, const CabrWeights* weights = nullptr);

    FrameOutput push(const Frame& frame, const KeyframeProvider& keyframes);

    const FlopLedger& ledger() const { return ledger_; }
    std::size_t frames() const { return frames_; }
    std::size_t keyframes() const { return keyframes_; }
    const PipelineConfig& config() const { return config_; }

private:
    PipelineConfig config_;
    const CabrWeights* weights_;
    FlopLedger ledger_;
    AemState aem_;
    std::size_t frames_ = 0;
    std::size_t keyframes_ = 0;
    std::optional<SearchSurface> prev_surface_;
    std::optional<SearchSurface> key_surface_;
    LabelMap prev_labels_;
    LabelMap key_labels_;
};

struct RunResult {
    std::vector<FrameOutput> outputs;
    RunReport report;
    std::vector<std::optional<double>> miou; ///< per frame, when truth is given
};

/// Runs a whole in-memory sequence. `truth`, when non-empty, must hold one
/// map per frame and enables the mIoU fields of the report.
RunResult run_sequence(std::span<const Frame> frames, const KeyframeProvider& keyframes, const PipelineConfig& config,
                       const CabrWeights* weights = nullptr, std::span<const LabelMap> truth = {});

} // namespace bayermc
