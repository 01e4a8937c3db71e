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
#include <string_view>

#include "bayermc/fme.hpp"
#include "bayermc/frame.hpp"
#include "bayermc/frame_select.hpp"

namespace bayermc {

struct PipelineConfig {
    std::string preset = "standard";
    FmeConfig fme = fme_preset("standard");
    int deviation_threshold = 4;
    SelectConfig select;
    FrameKind pattern = FrameKind::BayerRGGB;
    double backbone_gflops = 399.87;
    std::optional<int> num_classes;
    std::optional<int> ignore_class;

    void validate() const;
};

/// Parses a TOML document:
///
///   preset = "standard"          # base FME parameters
///   [frames]  pattern = "rggb"
///   [fme]     lambda, block_sizes, split_threshold, sparsity_tolerance,
///             refine_block_threshold
///   [fme.coarse] / [fme.intermediate] / [fme.fine]   range, step
///   [refine]  deviation_threshold
///   [select]  aem_threshold, max_gop, statistic = "max"|"mean",
///             reference = "previous"|"key"
///   [metrics] backbone_gflops, num_classes, ignore_class
///
/// Keys in [fme] override the preset. `preset_override`, when given, replaces
/// the document's preset. Unknown keys are rejected.
PipelineConfig parse_pipeline_config(std::string_view toml_text,
                                     const std::optional<std::string>& preset_override = std::nullopt);
PipelineConfig load_pipeline_config(const std::filesystem::path& path,
                                    const std::optional<std::string>& preset_override = std::nullopt);

/// Defaults with the given preset applied.
PipelineConfig default_pipeline_config(const std::string& preset = "standard");

} // namespace bayermc
