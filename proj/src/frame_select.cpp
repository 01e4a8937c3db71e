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

#include "bayermc/frame_select.hpp"

#include <algorithm>

namespace bayermc {

std::string to_string(DecisionKind kind) {
    switch (kind) {
        case DecisionKind::Key: return "key";
        case DecisionKind::NonKeyPrevRef: return "nonkey_prev";
        case DecisionKind::NonKeyKeyRef: return "nonkey_key";
    }
    return "unknown";
}

AemStatistic parse_aem_statistic(std::string_view name) {
    if (name == "max") return AemStatistic::Max;
    if (name == "mean") return AemStatistic::Mean;
    throw ConfigError("unknown AEM statistic '" + std::string(name) + "' (expected max or mean)");
}

ReferencePolicy parse_reference_policy(std::string_view name) {
    if (name == "previous") return ReferencePolicy::Previous;
    if (name == "key") return ReferencePolicy::LastKey;
    throw ConfigError("unknown reference policy '" + std::string(name) + "' (expected previous or key)");
}

std::string to_string(AemStatistic s) { return s == AemStatistic::Max ? "max" : "mean"; }
std::string to_string(ReferencePolicy p) { return p == ReferencePolicy::Previous ? "previous" : "key"; }

void AemState::reset() {
    accumulated = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(grid_w) * grid_h);
    frames_since_key = 0;
}

std::pair<FrameDecision, AemState> open_gop(int grid_w, int grid_h) {
    if (grid_w <= 0 || grid_h <= 0) throw ShapeError("open_gop: empty AEM grid");
    AemState state;
    state.grid_w = grid_w;
    state.grid_h = grid_h;
    state.reset();
    state.last_key_index = 0;
    state.next_frame_index = 1;
    return {FrameDecision{0, DecisionKind::Key, std::nullopt, 0.0}, std::move(state)};
}

Eigen::ArrayXd reduce_energy(const MotionField& field, int grid_w, int grid_h) {
    field.validate();
    if (grid_w <= 0 || grid_h <= 0 || field.grid_w % grid_w != 0 || field.grid_h % grid_h != 0 ||
        field.grid_w / grid_w != field.grid_h / grid_h) {
        throw ShapeError("AEM grid " + std::to_string(grid_w) + "x" + std::to_string(grid_h) +
                         " does not align with motion field grid " + std::to_string(field.grid_w) + "x" +
                         std::to_string(field.grid_h));
    }
    const int ratio = field.grid_w / grid_w;
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(grid_w) * grid_h);
    for (int by = 0; by < field.grid_h; ++by) {
        for (int bx = 0; bx < field.grid_w; ++bx) {
            const auto c = static_cast<Eigen::Index>((by / ratio) * grid_w + bx / ratio);
            out[c] = std::max(out[c], field.energy[static_cast<Eigen::Index>(field.index(bx, by))]);
        }
    }
    return out;
}

std::pair<FrameDecision, AemState> decide(const AemState& state, const MotionField& field,
                                          const SelectConfig& config) {
    if (state.accumulated.size() != static_cast<Eigen::Index>(state.grid_w) * state.grid_h) {
        throw ShapeError("decide: AEM state is not initialised");
    }
    AemState next = state;
    next.accumulated += reduce_energy(field, state.grid_w, state.grid_h);
    const double statistic =
        config.statistic == AemStatistic::Max ? next.accumulated.maxCoeff() : next.accumulated.mean();

    FrameDecision decision;
    decision.frame_index = state.next_frame_index;
    decision.trigger_statistic = statistic;
    const bool gop_full = config.max_gop && state.frames_since_key + 1 >= *config.max_gop;
    if (statistic > config.aem_threshold || gop_full) {
        decision.kind = DecisionKind::Key;
        next.reset();
        next.last_key_index = decision.frame_index;
    } else if (config.reference == ReferencePolicy::LastKey) {
        decision.kind = DecisionKind::NonKeyKeyRef;
        decision.reference_index = state.last_key_index;
        ++next.frames_since_key;
    } else {
        decision.kind = DecisionKind::NonKeyPrevRef;
        decision.reference_index = decision.frame_index - 1;
        ++next.frames_since_key;
    }
    next.next_frame_index = decision.frame_index + 1;
    return {decision, std::move(next)};
}

} // namespace bayermc
