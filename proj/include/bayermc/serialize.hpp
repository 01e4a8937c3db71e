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

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "bayermc/fme.hpp"
#include "bayermc/frame_select.hpp"
#include "bayermc/metrics.hpp"

namespace bayermc {

/// {block_size, grid_w, grid_h, scale, mv: [[dx, dy], ...], energy: [...], matched: [...]}
nlohmann::json to_json(const MotionField& field);
MotionField motion_field_from_json(const nlohmann::json& j);
void save_motion_field(const MotionField& field, const std::filesystem::path& path);
MotionField load_motion_field(const std::filesystem::path& path);

/// 8-bit visualisation of the per-block energy at full resolution (energy 1 maps to 255).
Frame energy_map_image(const MotionField& field, int width, int height);

/// {"frame": i, "kind": "key", "reference": null | j, "trigger_statistic": s}
nlohmann::json to_json(const FrameDecision& decision);
FrameDecision decision_from_json(const nlohmann::json& j);

/// Summary of one pipeline run.
struct RunReport {
    FlopLedger ledger;
    std::size_t frames = 0;
    std::size_t keyframes = 0;
    double backbone_gflops = 0.0;
    std::optional<double> miou_all;
    std::optional<double> miou_nonkey;

    /// Per-frame average GFLOPs of the pipeline.
    double average_gflops() const;
    /// Per-frame GFLOPs when every frame runs the backbone.
    double baseline_gflops() const { return backbone_gflops; }
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);
/// Aligned text table with one row per component.
std::string report_table(const RunReport& report);

} // namespace bayermc
