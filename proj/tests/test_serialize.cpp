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

#include <gtest/gtest.h>

#include "bayermc/serialize.hpp"
#include "support/tempdir.hpp"

using namespace bayermc;
using bayermc::testing::TempDir;

TEST(MotionFieldJson, RoundTripIsExact) {
    MotionField f = MotionField::uniform(3, 2, 32, 2);
    f.mv[1] = {-5, 7};
    f.energy[2] = 0.1234567890123456789;
    f.energy[5] = 1.0 / 3.0;
    f.matched[4] = false;
    TempDir dir;
    save_motion_field(f, dir / "f.json");
    EXPECT_EQ(load_motion_field(dir / "f.json"), f);
    const nlohmann::json j = to_json(f);
    EXPECT_EQ(j.at("mv")[1], (nlohmann::json{-5, 7}));
    for (const char* key : {"block_size", "grid_w", "grid_h", "mv", "energy", "matched"}) EXPECT_TRUE(j.contains(key));
}

TEST(MotionFieldJson, RejectsInconsistentDocuments) {
    nlohmann::json j = to_json(MotionField::uniform(2, 2, 32));
    j["grid_w"] = 3;
    EXPECT_THROW(motion_field_from_json(j), ShapeError);
    EXPECT_THROW(motion_field_from_json(nlohmann::json{{"grid_w", 1}}), ShapeError);
    TempDir dir;
    std::ofstream(dir / "bad.json") << "{ not json";
    EXPECT_THROW(load_motion_field(dir / "bad.json"), IoError);
}

TEST(EnergyMap, ScalesEnergyToGray) {
    MotionField f = MotionField::uniform(2, 1, 32);
    f.energy << 0.0, 1.0;
    const Frame img = energy_map_image(f, 50, 20);
    EXPECT_EQ(img.width(), 50);
    EXPECT_EQ(img(0, 0), 0);
    EXPECT_EQ(img(19, 40), 255);
}

TEST(DecisionJson, RoundTrip) {
    const FrameDecision key{0, DecisionKind::Key, std::nullopt, 0.0};
    const FrameDecision non{7, DecisionKind::NonKeyPrevRef, 6, 0.0625};
    for (const auto& d : {key, non}) {
        const FrameDecision back = decision_from_json(to_json(d));
        EXPECT_EQ(back.frame_index, d.frame_index);
        EXPECT_EQ(back.kind, d.kind);
        EXPECT_EQ(back.reference_index, d.reference_index);
        EXPECT_EQ(back.trigger_statistic, d.trigger_statistic);
    }
    EXPECT_TRUE(to_json(key).at("reference").is_null());
}

TEST(RunReport, JsonAndTable) {
    RunReport r;
    r.ledger.add_backbone_frame(400.0);
    r.ledger.add(Component::Fme, 2000000000u);
    r.frames = 5;
    r.keyframes = 1;
    r.backbone_gflops = 400.0;
    r.miou_all = 0.9;
    EXPECT_DOUBLE_EQ(r.average_gflops(), 80.4);
    const nlohmann::json j = to_json(r);
    EXPECT_NEAR(j.at("delta_percent").get<double>(), -79.9, 1e-9);
    const RunReport back = report_from_json(j);
    EXPECT_EQ(back.ledger, r.ledger);
    EXPECT_EQ(back.miou_all, r.miou_all);
    EXPECT_FALSE(back.miou_nonkey.has_value());
    const std::string table = report_table(r);
    EXPECT_NE(table.find("80.4"), std::string::npos);
    EXPECT_NE(table.find("-79.9"), std::string::npos);
}
