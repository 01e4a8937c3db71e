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
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "bayermc/frame.hpp"

namespace bayermc {

/// Square confusion matrix: counts(truth, pred).
using Confusion = Eigen::Array<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

Confusion confusion_matrix(const LabelMap& pred, const LabelMap& truth, int num_classes,
                           std::optional<int> ignore_class = std::nullopt);

/// Per-class IoU; classes absent from both maps get NaN.
Eigen::ArrayXd class_iou(const Confusion& confusion);

/// Mean IoU over classes present in the prediction or the truth. Pixels whose
/// truth equals `ignore_class` are skipped. Returns 1 when no class is present.
double miou(const LabelMap& pred, const LabelMap& truth, int num_classes,
            std::optional<int> ignore_class = std::nullopt);
double miou(const Confusion& confusion);

enum class Component { Backbone, Fme, MvRefine, Cabr, Prediction };
inline constexpr std::array<Component, 5> kComponents = {Component::Backbone, Component::Fme, Component::MvRefine,
                                                         Component::Cabr, Component::Prediction};

std::string to_string(Component c);
/// Row label used in text reports ("FME", "MV-Refine", ...).
std::string display_name(Component c);

/// Flop counts per pipeline component.
class FlopLedger {
public:
    void add(Component c, std::uint64_t flops);
    void add_backbone_frame(double gflops);

    std::uint64_t get(Component c) const { return entries_[static_cast<std::size_t>(c)]; }
    std::uint64_t total() const;
    /// Sum over every component but the backbone.
    std::uint64_t pipeline_total() const;
    std::size_t backbone_invocations() const { return backbone_invocations_; }

    FlopLedger& operator+=(const FlopLedger& other);
    bool operator==(const FlopLedger&) const = default;

private:
    std::array<std::uint64_t, kComponents.size()> entries_{};
    std::size_t backbone_invocations_ = 0;
};

/// (keyframes * backbone_gflops + non-backbone ledger GFLOPs) / frames.
double ledger_report(const FlopLedger& ledger, double backbone_gflops_per_keyframe, std::size_t frames,
                     std::size_t keyframes);

} // namespace bayermc
