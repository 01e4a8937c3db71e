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

#include <random>

#include <gtest/gtest.h>

#include "bayermc/mv_refine.hpp"
#include "bayermc/parallel.hpp"
#include "bayermc/synth.hpp"

using namespace bayermc;

TEST(WindowMedian, NineEntryExample) {
    MotionField f = MotionField::uniform(3, 3, 32);
    const int dx[9] = {1, 1, 1, 2, 9, 2, 2, 3, 3};
    for (int i = 0; i < 9; ++i) f.mv[static_cast<std::size_t>(i)] = {dx[i], 0};
    EXPECT_EQ(window_median(f, 1, 1), (MotionVector{2, 0}));
    const MotionField g = refine_mvs(f, 4);
    EXPECT_EQ(g.mv[4], (MotionVector{2, 0}));
}

TEST(WindowMedian, BorderWindowsUseLowerMiddle) {
    MotionField f = MotionField::uniform(3, 3, 32);
    // Corner window (0,0): entries (0,0),(1,0),(0,1),(1,1).
    f.mv[f.index(0, 0)] = {10, 0};
    f.mv[f.index(1, 0)] = {1, 0};
    f.mv[f.index(0, 1)] = {4, 0};
    f.mv[f.index(1, 1)] = {7, 0};
    EXPECT_EQ(window_median(f, 0, 0), (MotionVector{4, 0}));
    // Edge window (1,0): six entries, dx sorted {0,1,4,7,10,0} -> {0,0,1,4,7,10}.
    EXPECT_EQ(window_median(f, 1, 0).dx, 1);
}

TEST(RefineMvs, ConstantFieldUnchanged) {
    const MotionField f = MotionField::uniform(6, 5, 32, 1, {2, 0});
    RefineStats stats;
    EXPECT_EQ(refine_mvs(f, 4, &stats), f);
    EXPECT_EQ(stats.replaced, 0u);
}

TEST(RefineMvs, CentreOutlierReplaced) {
    MotionField f = MotionField::uniform(3, 3, 32, 1, {2, 0});
    f.mv[4] = {30, -12};
    RefineStats stats;
    const MotionField g = refine_mvs(f, 4, &stats);
    for (const auto& v : g.mv) EXPECT_EQ(v, (MotionVector{2, 0}));
    EXPECT_EQ(stats.replaced, 1u);
}

TEST(RefineMvs, ThresholdIsStrict) {
    MotionField f = MotionField::uniform(3, 3, 32, 1, {0, 0});
    f.mv[4] = {4, -4};
    EXPECT_EQ(refine_mvs(f, 4).mv[4], (MotionVector{4, -4}));
    f.mv[4] = {5, 0};
    EXPECT_EQ(refine_mvs(f, 4).mv[4], (MotionVector{0, 0}));
}

TEST(RefineMvs, BayerDeviationIsMeasuredInPixels) {
    MotionField f = MotionField::uniform(3, 3, 32, 2, {0, 0});
    f.mv[4] = {3, 0}; // 6 px
    EXPECT_EQ(refine_mvs(f, 4).mv[4], (MotionVector{0, 0}));
    f.mv[4] = {2, 0}; // 4 px
    EXPECT_EQ(refine_mvs(f, 4).mv[4], (MotionVector{2, 0}));
}

TEST(RefineMvs, ReadsOnlyFromInput) {
    // An in-place scan would turn block 2 into 0 after repairing block 1.
    MotionField f = MotionField::uniform(5, 1, 32);
    const int dx[5] = {0, 20, 0, 20, 0};
    for (int i = 0; i < 5; ++i) f.mv[static_cast<std::size_t>(i)] = {dx[i], 0};
    const MotionField g = refine_mvs(f, 4);
    const int expected[5] = {0, 0, 20, 0, 0};
    for (int i = 0; i < 5; ++i) EXPECT_EQ(g.mv[static_cast<std::size_t>(i)].dx, expected[i]) << i;
}

TEST(RefineMvs, OnlyOutliersChange) {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> d(-12, 12);
    for (int trial = 0; trial < 50; ++trial) {
        MotionField f = MotionField::uniform(7, 6, 16);
        for (auto& v : f.mv) v = {d(rng), d(rng)};
        const MotionField g = refine_mvs(f, 4);
        for (int by = 0; by < f.grid_h; ++by) {
            for (int bx = 0; bx < f.grid_w; ++bx) {
                const std::size_t i = f.index(bx, by);
                const MotionVector m = window_median(f, bx, by);
                const bool outlier = std::max(std::abs(f.mv[i].dx - m.dx), std::abs(f.mv[i].dy - m.dy)) > 4;
                EXPECT_EQ(g.mv[i], outlier ? m : f.mv[i]);
            }
        }
    }
}

TEST(RefineMvs, DeterministicAcrossWorkerCounts) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> d(-20, 20);
    MotionField f = MotionField::uniform(40, 30, 16);
    for (auto& v : f.mv) v = {d(rng), d(rng)};
    MotionField base;
    {
        ScopedWorkerCount one(1);
        base = refine_mvs(f, 4);
    }
    for (std::size_t w : {2u, 5u, 16u}) {
        ScopedWorkerCount scope(w);
        EXPECT_EQ(refine_mvs(f, 4), base);
    }
}

TEST(RefineMvs, EmptyFieldIsAnError) {
    EXPECT_THROW(refine_mvs(MotionField{}, 4), ShapeError);
}

TEST(RefineMvs, RecomputesEnergyOfReplacedBlocks) {
    const Frame ref(synth::value_noise(128, 128, 3), FrameKind::Luma);
    const Frame cur(synth::value_noise(128, 128, 3, 2, 0), FrameKind::Luma);
    const SearchSurface cs = make_search_surface(cur, 32), rs = make_search_surface(ref, 32);
    FmeConfig cfg;
    cfg.block_sizes = {32};
    MotionField f = MotionField::uniform(4, 4, 32, 1, {2, 0}, 0.0, true);
    f.mv[f.index(1, 1)] = {-20, 9};
    f.energy[static_cast<Eigen::Index>(f.index(1, 1))] = 0.7;
    f.matched[static_cast<Eigen::Index>(f.index(1, 1))] = false;
    RefineStats stats;
    const MotionField g = refine_mvs(f, cs, rs, cfg, 4, &stats);
    const auto i = static_cast<Eigen::Index>(f.index(1, 1));
    EXPECT_EQ(g.mv[f.index(1, 1)], (MotionVector{2, 0}));
    EXPECT_EQ(g.energy[i], 0.0);
    EXPECT_TRUE(g.matched[i]);
    EXPECT_EQ(stats.replaced, 1u);
    EXPECT_EQ(stats.energy_evaluations, 1u);
    EXPECT_EQ(count_refine_flops(32, stats.energy_evaluations), 3u * 32 * 32 + 3);
}

TEST(RefineMvs, SkipsReplacementLeavingTheReference) {
    const Frame f0(synth::value_noise(64, 64, 3), FrameKind::Luma);
    const SearchSurface s = make_search_surface(f0, 32);
    FmeConfig cfg;
    cfg.block_sizes = {32};
    MotionField f = MotionField::uniform(2, 2, 32, 1, {-40, 0});
    f.mv[0] = {0, 0};
    const MotionField g = refine_mvs(f, s, s, cfg, 4);
    EXPECT_EQ(g.mv[0], (MotionVector{0, 0}));
}
