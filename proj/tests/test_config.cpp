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

#include <fstream>
#include <limits>

#include <gtest/gtest.h>

#include "bayermc/config.hpp"
#include "support/tempdir.hpp"

using namespace bayermc;

TEST(PipelineConfig, Defaults) {
    const PipelineConfig c = default_pipeline_config();
    EXPECT_EQ(c.preset, "standard");
    EXPECT_EQ(c.fme, FmeConfig{});
    EXPECT_EQ(c.deviation_threshold, 4);
    EXPECT_DOUBLE_EQ(c.select.aem_threshold, 0.15);
    EXPECT_FALSE(c.select.max_gop.has_value());
    EXPECT_EQ(c.pattern, FrameKind::BayerRGGB);
    EXPECT_DOUBLE_EQ(c.backbone_gflops, 399.87);
}

TEST(PipelineConfig, PresetThenFileThenOverride) {
    const char* doc = R"(
preset = "mode2"
[fme]
lambda = 0.3
[fme.fine]
step = 2
[select]
max_gop = 5
statistic = "mean"
reference = "key"
[frames]
pattern = "bggr"
[metrics]
num_classes = 19
ignore_class = 255
)";
    const PipelineConfig c = parse_pipeline_config(doc);
    EXPECT_EQ(c.preset, "mode2");
    EXPECT_EQ(c.fme.stages[0], (SearchStage{10, 8}));
    EXPECT_EQ(c.fme.stages[2], (SearchStage{4, 2}));
    EXPECT_DOUBLE_EQ(c.fme.lambda, 0.3);
    EXPECT_EQ(c.select.max_gop, 5);
    EXPECT_EQ(c.select.statistic, AemStatistic::Mean);
    EXPECT_EQ(c.select.reference, ReferencePolicy::LastKey);
    EXPECT_EQ(c.pattern, FrameKind::BayerBGGR);
    EXPECT_EQ(c.num_classes, 19);
    EXPECT_EQ(c.ignore_class, 255);

    const PipelineConfig o = parse_pipeline_config(doc, std::string("mode5"));
    EXPECT_EQ(o.fme.stages[0], (SearchStage{4, 16}));
    EXPECT_DOUBLE_EQ(o.fme.lambda, 0.3);
}

TEST(PipelineConfig, InfiniteThresholdAndUnsetGop) {
    const PipelineConfig c = parse_pipeline_config("[select]\naem_threshold = inf\nmax_gop = 0\n");
    EXPECT_EQ(c.select.aem_threshold, std::numeric_limits<double>::infinity());
    EXPECT_FALSE(c.select.max_gop.has_value());
}

TEST(PipelineConfig, RejectsBadDocuments) {
    EXPECT_THROW(parse_pipeline_config("[fme]\nlamda = 0.2\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("colour = 1\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("[fme]\nblock_sizes = [64, 16]\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("[fme]\nlambda = \"high\"\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("preset = \"mode8\"\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("[select\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("[select]\nstatistic = \"median\"\n"), ConfigError);
    EXPECT_THROW(parse_pipeline_config("[refine]\ndeviation_threshold = -1\n"), ConfigError);
}

TEST(PipelineConfig, LoadFromFile) {
    bayermc::testing::TempDir dir;
    std::ofstream(dir / "c.toml") << "[fme]\nblock_sizes = [32]\n";
    EXPECT_EQ(load_pipeline_config(dir / "c.toml").fme.block_sizes, std::vector<int>{32});
    EXPECT_THROW(load_pipeline_config(dir / "none.toml"), IoError);
}

TEST(Presets, MatchSettingsTable) {
    // Columns: coarse range/step, intermediate range/step, fine range/step, lambda, block sizes.
    EXPECT_EQ(fme_preset("standard").block_sizes, (std::vector<int>{64, 32}));
    EXPECT_EQ(fme_preset("mode1").stages[1], (SearchStage{4, 4}));
    EXPECT_EQ(fme_preset("mode2").stages[2], (SearchStage{4, 4}));
    EXPECT_EQ(fme_preset("mode3").block_sizes, (std::vector<int>{32}));
    EXPECT_EQ(fme_preset("mode4").block_sizes, (std::vector<int>{64, 32, 16, 8}));
    EXPECT_EQ(fme_preset("mode5").stages[0], (SearchStage{4, 16}));
    EXPECT_DOUBLE_EQ(fme_preset("mode6").lambda, 0.5);
    EXPECT_DOUBLE_EQ(fme_preset("mode7").lambda, 0.8);
}
