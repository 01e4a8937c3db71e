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

// Keyframe selection from the accumulative energy map (AEM): the per-block sum
// of matching energies since the last key frame. A frame becomes a key frame
// once the reduced AEM exceeds a threshold (or the GOP reaches max_gop).

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Core>

#include "bayermc/fme.hpp"

namespace bayermc {

enum class DecisionKind { Key, NonKeyPrevRef, NonKeyKeyRef };
enum class AemStatistic { Max, Mean };
enum class ReferencePolicy { Previous, LastKey };

std::string to_string(DecisionKind kind);
AemStatistic parse_aem_statistic(std::string_view name);
ReferencePolicy parse_reference_policy(std::string_view name);
std::string to_string(AemStatistic s);
std::string to_string(ReferencePolicy p);

struct FrameDecision {
    int frame_index = 0;
    DecisionKind kind = DecisionKind::Key;
    std::optional<int> reference_index; ///< empty for key frames
    double trigger_statistic = 0.0;

    bool is_key() const { return kind == DecisionKind::Key; }
    bool operator==(const FrameDecision&) const = default;
};

struct SelectConfig {
    double aem_threshold = 0.15;
    std::optional<int> max_gop;
    AemStatistic statistic = AemStatistic::Max;
    ReferencePolicy reference = ReferencePolicy::Previous;

    bool operator==(const SelectConfig&) const = default;
};

/// AEM at the coarsest block granularity.
struct AemState {
    int grid_w = 0;
    int grid_h = 0;
    Eigen::ArrayXd accumulated;
    int frames_since_key = 0;
    int last_key_index = 0;
    int next_frame_index = 1;

    void reset();
};

/// Bootstraps a sequence: frame 0 is a key frame with a zeroed AEM.
std::pair<FrameDecision, AemState> open_gop(int grid_w, int grid_h);

/// Max-reduces the final-level energies of `field` onto a coarser grid.
Eigen::ArrayXd reduce_energy(const MotionField& field, int grid_w, int grid_h);

/// Accumulates the refined energies of the next frame and classifies it.
std::pair<FrameDecision, AemState> decide(const AemState& state, const MotionField& field,
                                          const SelectConfig& config);

} // namespace bayermc
