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

#include <cstdio>
#include <fstream>
#include <random>

#include <gtest/gtest.h>
#include <png.h>

#include "bayermc/error.hpp"
#include "bayermc/frame.hpp"
#include "bayermc/image_io.hpp"
#include "support/tempdir.hpp"

using namespace bayermc;
using bayermc::testing::TempDir;

namespace {

void write_rgb_png(const std::filesystem::path& path, int w, int h) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    ASSERT_NE(fp, nullptr);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, fp);
    png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<std::size_t>(w) * 3, 77);
    for (int y = 0; y < h; ++y) png_write_row(png, row.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

PixelPlane random_plane(int w, int h, int max, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> d(0, max);
    PixelPlane p(h, w);
    for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = static_cast<std::uint16_t>(d(rng));
    return p;
}

} // namespace

TEST(Frame, RejectsOddBayerAndOverrange) {
    EXPECT_THROW(Frame(PixelPlane::Zero(3, 4), FrameKind::BayerRGGB), ShapeError);
    EXPECT_NO_THROW(Frame(PixelPlane::Zero(3, 5), FrameKind::Luma));
    EXPECT_THROW(Frame(PixelPlane::Constant(2, 2, 300), FrameKind::Luma, 255), ShapeError);
}

TEST(Frame, ParseKindNames) {
    EXPECT_EQ(parse_frame_kind("rggb"), FrameKind::BayerRGGB);
    EXPECT_EQ(parse_frame_kind("GBRG"), FrameKind::BayerGBRG);
    EXPECT_EQ(parse_frame_kind("luma"), FrameKind::Luma);
    EXPECT_THROW(parse_frame_kind("rgbw"), ConfigError);
}

TEST(Mosaic, ConstantColourPlacement) {
    const Frame f = mosaic_rgb(PixelPlane::Constant(4, 4, 200), PixelPlane::Constant(4, 4, 100),
                               PixelPlane::Constant(4, 4, 50), FrameKind::BayerRGGB);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            const int expected = (y % 2 == 0 && x % 2 == 0) ? 200 : (y % 2 == 1 && x % 2 == 1) ? 50 : 100;
            EXPECT_EQ(f(y, x), expected) << y << "," << x;
        }
    }
}

TEST(Mosaic, PureGreenHasZeroAtRedAndBlueSites) {
    const PixelPlane zero = PixelPlane::Zero(4, 6);
    const Frame f = mosaic_rgb(zero, PixelPlane::Constant(4, 6, 180), zero, FrameKind::BayerRGGB);
    EXPECT_EQ(f(0, 0), 0);
    EXPECT_EQ(f(1, 1), 0);
    EXPECT_EQ(f(0, 1), 180);
    EXPECT_EQ(f(1, 0), 180);
}

TEST(Mosaic, TwoByTwoDefinition) {
    PixelPlane r(2, 2), g(2, 2), b(2, 2);
    r << 1, 2, 3, 4;
    g << 11, 12, 13, 14;
    b << 21, 22, 23, 24;
    const Frame f = mosaic_rgb(r, g, b, FrameKind::BayerRGGB);
    EXPECT_EQ(f(0, 0), 1);
    EXPECT_EQ(f(0, 1), 12);
    EXPECT_EQ(f(1, 0), 13);
    EXPECT_EQ(f(1, 1), 24);
}

TEST(Mosaic, EveryPixelTakesExactlyOneChannelForAllPatterns) {
    const PixelPlane r = random_plane(8, 6, 255, 1), g = random_plane(8, 6, 255, 2), b = random_plane(8, 6, 255, 3);
    for (FrameKind k : {FrameKind::BayerRGGB, FrameKind::BayerBGGR, FrameKind::BayerGRBG, FrameKind::BayerGBRG}) {
        const Frame f = mosaic_rgb(r, g, b, k);
        for (int y = 0; y < 6; ++y) {
            for (int x = 0; x < 8; ++x) {
                const int c = cfa_channel(k, y % 2, x % 2);
                const PixelPlane& src = c == 0 ? r : c == 1 ? g : b;
                EXPECT_EQ(f(y, x), src(y, x));
            }
        }
    }
}

TEST(Mosaic, RejectsOddOrMismatchedPlanes) {
    EXPECT_THROW(mosaic_rgb(PixelPlane::Zero(3, 4), PixelPlane::Zero(3, 4), PixelPlane::Zero(3, 4),
                            FrameKind::BayerRGGB),
                 ShapeError);
    EXPECT_THROW(mosaic_rgb(PixelPlane::Zero(4, 4), PixelPlane::Zero(4, 6), PixelPlane::Zero(4, 4),
                            FrameKind::BayerRGGB),
                 ShapeError);
}

TEST(PackBayer, IndexArithmetic) {
    PixelPlane p(4, 4);
    for (int i = 0; i < 16; ++i) p.data()[i] = static_cast<std::uint16_t>(i);
    const PackedBayer packed = pack_bayer(Frame(p, FrameKind::BayerRGGB));
    const std::array<std::array<int, 4>, 4> expected = {{{0, 2, 8, 10}, {1, 3, 9, 11}, {4, 6, 12, 14}, {5, 7, 13, 15}}};
    for (int k = 0; k < 4; ++k) {
        ASSERT_EQ(packed.planes[k].rows(), 2);
        ASSERT_EQ(packed.planes[k].cols(), 2);
        for (int i = 0; i < 4; ++i) EXPECT_EQ(packed.planes[k].data()[i], expected[k][i]) << "plane " << k;
    }
}

TEST(PackBayer, RoundTripOnRandomFrames) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int w = 2 * (1 + static_cast<int>(seed % 7)), h = 2 * (1 + static_cast<int>(seed % 5));
        const Frame f(random_plane(w, h, 1023, seed), FrameKind::BayerGRBG, 1023);
        EXPECT_EQ(unpack_bayer(pack_bayer(f)), f);
    }
}

TEST(PackBayer, ConstantFrameGivesConstantPlanes) {
    const PackedBayer p = pack_bayer(Frame(PixelPlane::Constant(6, 8, 9), FrameKind::BayerRGGB));
    for (const auto& plane : p.planes) EXPECT_TRUE((plane == 9).all());
}

TEST(PackBayer, RejectsLuma) {
    EXPECT_THROW(pack_bayer(Frame(PixelPlane::Zero(4, 4), FrameKind::Luma)), ShapeError);
}

TEST(PadEdge, ReplicatesLastRowAndColumn) {
    PixelPlane p(2, 2);
    p << 1, 2, 3, 4;
    const PixelPlane q = pad_edge(p, 3, 4);
    PixelPlane expected(3, 4);
    expected << 1, 2, 2, 2, 3, 4, 4, 4, 3, 4, 4, 4;
    EXPECT_TRUE((q == expected).all());
}

TEST(ImageIo, ConstantPgmRoundTrip) {
    TempDir dir;
    const Frame f(PixelPlane::Constant(4, 4, 128), FrameKind::Luma);
    save_frame(f, dir / "c.pgm");
    const Frame g = load_frame(dir / "c.pgm");
    EXPECT_EQ(g.width(), 4);
    EXPECT_EQ(g.height(), 4);
    EXPECT_TRUE((g.data() == 128).all());
}

TEST(ImageIo, BitExactRoundTrips) {
    TempDir dir;
    const Frame f8(random_plane(10, 6, 255, 4), FrameKind::BayerRGGB, 255);
    const Frame f16(random_plane(10, 6, 65535, 5), FrameKind::BayerRGGB, 65535);
    const Frame f10(random_plane(10, 6, 1023, 6), FrameKind::Luma, 1023);
    for (const char* ext : {".pgm", ".png"}) {
        for (const Frame* f : {&f8, &f16}) {
            const auto p = dir / (std::string("f") + std::to_string(f->max_value()) + ext);
            save_frame(*f, p);
            EXPECT_EQ(load_frame(p, f->kind()), *f) << p;
        }
    }
    save_frame(f10, dir / "f10.pgm");
    EXPECT_EQ(load_frame(dir / "f10.pgm"), f10);
}

TEST(ImageIo, PgmWithCommentsParses) {
    TempDir dir;
    std::ofstream(dir / "h.pgm", std::ios::binary) << "P5\n# comment\n2 1\n# another\n255\n"
                                                    << '\x05' << '\x06';
    const Frame f = load_frame(dir / "h.pgm");
    EXPECT_EQ(f(0, 0), 5);
    EXPECT_EQ(f(0, 1), 6);
}

TEST(ImageIo, ErrorsAreExplicit) {
    TempDir dir;
    write_rgb_png(dir / "rgb.png", 4, 4);
    try {
        load_frame(dir / "rgb.png");
        FAIL() << "expected an error";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("expected single channel"), std::string::npos);
        EXPECT_EQ(e.path(), (dir / "rgb.png").string());
    }
    EXPECT_THROW(load_frame(dir / "missing.pgm"), IoError);
    std::ofstream(dir / "bad.pgm", std::ios::binary) << "P2\n1 1\n255\n7\n";
    EXPECT_THROW(load_frame(dir / "bad.pgm"), IoError);
    std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n4 4\n255\nab";
    EXPECT_THROW(load_frame(dir / "short.pgm"), IoError);
}

TEST(ImageIo, RgbPngAndPpmLoad) {
    TempDir dir;
    write_rgb_png(dir / "rgb.png", 4, 2);
    const RgbImage img = load_rgb(dir / "rgb.png");
    EXPECT_EQ(img.channels[1].cols(), 4);
    EXPECT_TRUE((img.channels[2] == 77).all());
    save_rgb_ppm(img, dir / "rgb.ppm");
    const RgbImage back = load_rgb(dir / "rgb.ppm");
    for (int c = 0; c < 3; ++c) EXPECT_TRUE((back.channels[c] == img.channels[c]).all());
}

TEST(Labels, RoundTripBothFormats) {
    TempDir dir;
    ClassPlane c(3, 5);
    for (int i = 0; i < 15; ++i) c.data()[i] = static_cast<std::uint8_t>(i % 4);
    const LabelMap m(c, 4);
    save_labels(m, dir / "l.png");
    EXPECT_EQ(load_labels(dir / "l.png", 4), m);
    save_labels(m, dir / "l.raw", LabelFormat::RawU8);
    EXPECT_EQ(load_labels_raw(dir / "l.raw", 5, 3, 4), m);
}

TEST(Labels, ClassOutOfRangeIsAnError) {
    TempDir dir;
    ClassPlane c = ClassPlane::Zero(2, 2);
    c(1, 1) = 5;
    EXPECT_THROW(LabelMap(c, 5), ShapeError);
    save_labels(LabelMap::infer(c), dir / "l.png");
    EXPECT_THROW(load_labels(dir / "l.png", 3), IoError);
}

TEST(Labels, AllZeroMapIsClassZero) {
    const LabelMap m = LabelMap::infer(ClassPlane::Zero(3, 3));
    EXPECT_EQ(m.num_classes(), 1);
    EXPECT_TRUE((m.classes() == 0).all());
}
