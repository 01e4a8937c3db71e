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

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bayermc/cabr.hpp"
#include "bayermc/config.hpp"
#include "bayermc/image_io.hpp"
#include "bayermc/metrics.hpp"
#include "bayermc/mv_refine.hpp"
#include "bayermc/pipeline.hpp"
#include "bayermc/propagate.hpp"
#include "bayermc/serialize.hpp"
#include "bayermc/synth.hpp"

namespace fs = std::filesystem;
using namespace bayermc;

namespace {

std::vector<fs::path> list_images(const fs::path& dir, std::initializer_list<const char*> extensions) {
    if (!fs::is_directory(dir)) throw IoError(dir.string(), "not a directory");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        for (const char* e : extensions) {
            if (ext == e) out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double parse_threshold(const std::string& text) {
    if (text == "inf" || text == "infinity" || text == "none") return std::numeric_limits<double>::infinity();
    return std::stod(text);
}

struct CommonOptions {
    std::optional<std::string> preset;
    std::optional<std::string> config;
    std::optional<std::string> pattern;
};

PipelineConfig resolve_config(const CommonOptions& o) {
    PipelineConfig c = o.config ? load_pipeline_config(*o.config, o.preset)
                                : default_pipeline_config(o.preset.value_or("standard"));
    if (o.pattern) c.pattern = parse_frame_kind(*o.pattern);
    return c;
}

int cmd_mosaic(const fs::path& input, const std::string& pattern, const fs::path& out_dir) {
    const FrameKind kind = parse_frame_kind(pattern);
    if (!is_bayer(kind)) throw ConfigError("mosaic: --pattern must be a Bayer layout");
    const auto files = list_images(input, {".ppm", ".png"});
    if (files.empty()) {
        std::cerr << "warning: no .ppm or .png images in " << input.string() << '\n';
        return 0;
    }
    fs::create_directories(out_dir);
    int failures = 0;
    for (const auto& f : files) {
        try {
            const RgbImage rgb = load_rgb(f);
            const Frame bayer = mosaic_rgb(rgb.channels[0], rgb.channels[1], rgb.channels[2], kind, rgb.max_value);
            save_frame(bayer, out_dir / (f.stem().string() + ".pgm"), ImageFormat::Pgm);
        } catch (const Error& e) {
            std::cerr << "error: " << f.string() << ": " << e.what() << '\n';
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

int cmd_estimate(const fs::path& cur_path, const fs::path& ref_path, const CommonOptions& common,
                 std::optional<int> deviation, const fs::path& out) {
    PipelineConfig c = resolve_config(common);
    if (deviation) c.deviation_threshold = *deviation;
    const Frame cur = load_frame(cur_path, c.pattern);
    const Frame ref = load_frame(ref_path, c.pattern);
    const int pad = c.fme.block_sizes.front();
    const SearchSurface cs = make_search_surface(cur, pad);
    const SearchSurface rs = make_search_surface(ref, pad);
    const FmeResult fme = estimate_motion(cs, rs, c.fme);
    const MotionField field = refine_mvs(fme.final_level(), cs, rs, c.fme, c.deviation_threshold);
    save_motion_field(field, out);
    fs::path energy_path = out;
    energy_path.replace_filename(out.stem().string() + "_energy.pgm");
    save_frame(energy_map_image(field, cur.width(), cur.height()), energy_path, ImageFormat::Pgm);
    std::cout << "blocks " << field.size() << ", flagged " << field.unmatched().size() << ", fme flops "
              << count_fme_flops(c.fme, fme.evaluations) << '\n';
    return 0;
}

int cmd_propagate(const fs::path& labels_path, const fs::path& field_path, std::optional<int> scale,
                  const fs::path& out) {
    const LabelMap labels = load_labels(labels_path);
    const MotionField field = load_motion_field(field_path);
    save_labels(predict_labels(labels, field, scale.value_or(field.scale)), out);
    return 0;
}

struct RunOptions {
    fs::path frames;
    fs::path keyframe_labels;
    std::optional<fs::path> truth;
    std::optional<fs::path> weights;
    std::optional<int> max_gop;
    std::optional<std::string> aem_threshold;
    fs::path out;
};

int cmd_run(const RunOptions& o, const CommonOptions& common) {
    PipelineConfig c = resolve_config(common);
    if (o.max_gop) c.select.max_gop = *o.max_gop > 0 ? o.max_gop : std::nullopt;
    if (o.aem_threshold) c.select.aem_threshold = parse_threshold(*o.aem_threshold);
    c.validate();

    const auto frames = list_images(o.frames, {".pgm", ".png"});
    if (frames.empty()) throw IoError(o.frames.string(), "no .pgm or .png frames");
    std::optional<CabrWeights> weights;
    if (o.weights) weights = load_cabr_weights(*o.weights);

    fs::create_directories(o.out / "labels");
    std::ofstream decisions(o.out / "decisions.jsonl");
    if (!decisions) throw IoError((o.out / "decisions.jsonl").string(), "cannot open for writing");

    std::size_t consumed = 0;
    KeyframeProvider provider = [&](int index) {
        const fs::path p = o.keyframe_labels / (frames[static_cast<std::size_t>(index)].stem().string() + ".png");
        if (!fs::exists(p)) {
            throw IoError(p.string(), "missing keyframe labels for frame " + std::to_string(index));
        }
        ++consumed;
        return load_labels(p, c.num_classes);
    };

    Pipeline pipeline(c, weights ? &*weights : nullptr);
    double sum_all = 0.0;
    double sum_nonkey = 0.0;
    std::size_t nonkey = 0;
    for (std::size_t t = 0; t < frames.size(); ++t) {
        const Frame frame = load_frame(frames[t], c.pattern);
        const FrameOutput result = pipeline.push(frame, provider);
        save_labels(result.labels, o.out / "labels" / (frames[t].stem().string() + ".png"));
        decisions << to_json(result.decision).dump() << '\n';
        if (o.truth) {
            const LabelMap truth = load_labels(*o.truth / (frames[t].stem().string() + ".png"));
            const int classes = std::max(truth.num_classes(), result.labels.num_classes());
            const double m = miou(result.labels, truth, classes, c.ignore_class);
            sum_all += m;
            if (!result.decision.is_key()) {
                sum_nonkey += m;
                ++nonkey;
            }
        }
    }

    RunReport report;
    report.ledger = pipeline.ledger();
    report.frames = pipeline.frames();
    report.keyframes = pipeline.keyframes();
    report.backbone_gflops = c.backbone_gflops;
    if (o.truth) {
        report.miou_all = sum_all / static_cast<double>(frames.size());
        if (nonkey > 0) report.miou_nonkey = sum_nonkey / static_cast<double>(nonkey);
    }
    if (consumed != report.keyframes || report.ledger.backbone_invocations() != report.keyframes) {
        throw Error("internal: keyframe label count disagrees with the decision log");
    }
    std::ofstream(o.out / "report.json") << to_json(report).dump(2) << '\n';
    const std::string table = report_table(report);
    std::ofstream(o.out / "report.txt") << table;
    std::cout << table;
    return 0;
}

int cmd_eval(const fs::path& pred, const fs::path& truth, std::optional<int> classes, std::optional<int> ignore) {
    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (fs::is_directory(pred)) {
        for (const auto& p : list_images(pred, {".png"})) pairs.emplace_back(p, truth / p.filename());
    } else {
        pairs.emplace_back(pred, truth);
    }
    if (pairs.empty()) throw IoError(pred.string(), "no label maps to evaluate");
    double sum = 0.0;
    for (const auto& [p, t] : pairs) {
        const LabelMap pm = load_labels(p);
        const LabelMap tm = load_labels(t);
        const int n = classes.value_or(std::max(pm.num_classes(), tm.num_classes()));
        const double m = miou(pm, tm, n, ignore);
        std::printf("%s %.6f\n", p.filename().string().c_str(), m);
        sum += m;
    }
    std::printf("mean %.6f\n", sum / static_cast<double>(pairs.size()));
    return 0;
}

int cmd_report(const fs::path& path, bool as_json) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    const RunReport report = report_from_json(nlohmann::json::parse(in));
    if (as_json) {
        std::cout << to_json(report).dump(2) << '\n';
    } else {
        std::cout << report_table(report);
    }
    return 0;
}

int cmd_synth(const fs::path& out, int width, int height, int frames, std::vector<int> velocity, int square,
              std::uint64_t seed, const std::string& pattern, std::optional<int> cut) {
    synth::TranslatingScene scene;
    scene.width = width;
    scene.height = height;
    scene.frames = frames;
    scene.velocity_x = velocity.at(0);
    scene.velocity_y = velocity.at(1);
    scene.square_size = square;
    scene.seed = seed;
    scene.kind = parse_frame_kind(pattern);
    const synth::Sequence seq =
        cut ? synth::gen_scene_cut(scene, *cut, seed, seed + 7919) : synth::gen_translating_scene(scene);
    fs::create_directories(out / "frames");
    fs::create_directories(out / "labels");
    for (std::size_t t = 0; t < seq.frames.size(); ++t) {
        char stem[32];
        std::snprintf(stem, sizeof stem, "frame_%04zu", t);
        save_frame(seq.frames[t], out / "frames" / (std::string(stem) + ".pgm"), ImageFormat::Pgm);
        save_labels(seq.labels[t], out / "labels" / (std::string(stem) + ".png"));
    }
    std::cout << "wrote " << seq.frames.size() << " frames to " << out.string() << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion-compensated result propagation for raw Bayer and luma video"};
    app.require_subcommand(1);

    CommonOptions common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--preset", common.preset, "FME preset: standard, mode1 .. mode7");
        sub->add_option("--config", common.config, "TOML configuration file");
        sub->add_option("--pattern", common.pattern, "frame layout: rggb (default), bggr, grbg, gbrg, luma");
    };

    std::string mosaic_in, mosaic_pattern = "rggb", mosaic_out;
    auto* mosaic = app.add_subcommand("mosaic", "Convert a directory of RGB images (PPM/PNG) to Bayer PGM");
    mosaic->add_option("input", mosaic_in, "directory of RGB images")->required();
    mosaic->add_option("--pattern", mosaic_pattern, "CFA layout");
    mosaic->add_option("--out", mosaic_out, "output directory")->required();

    std::string est_cur, est_ref, est_out;
    std::optional<int> est_dev;
    auto* estimate = app.add_subcommand("estimate", "Estimate and refine motion between two frames");
    estimate->add_option("cur", est_cur, "current frame")->required();
    estimate->add_option("ref", est_ref, "reference frame")->required();
    estimate->add_option("--deviation", est_dev, "MV refinement deviation threshold");
    estimate->add_option("--out", est_out, "motion field JSON")->required();
    add_common(estimate);

    std::string prop_labels, prop_field, prop_out;
    std::optional<int> prop_scale;
    auto* propagate = app.add_subcommand("propagate", "Motion-compensate a label map with a motion field");
    propagate->add_option("--labels", prop_labels, "reference label PNG")->required();
    propagate->add_option("--field", prop_field, "motion field JSON")->required();
    propagate->add_option("--scale", prop_scale, "vector scale (defaults to the field's)");
    propagate->add_option("--out", prop_out, "output label PNG")->required();

    RunOptions run_opts;
    std::string run_frames, run_kf, run_out;
    std::optional<std::string> run_truth, run_weights;
    auto* run = app.add_subcommand("run", "Run the full keyframe/propagation pipeline over a frame directory");
    run->add_option("frames", run_frames, "directory of frames (sorted by name)")->required();
    run->add_option("--keyframe-labels", run_kf, "directory of key-frame result maps")->required();
    run->add_option("--truth", run_truth, "directory of ground-truth label maps");
    run->add_option("--weights", run_weights, "CaBR-Net weight file (ring fallback otherwise)");
    run->add_option("--max-gop", run_opts.max_gop, "force a key frame every N frames (0 disables)");
    run->add_option("--aem-threshold", run_opts.aem_threshold, "AEM trigger threshold ('inf' disables)");
    run->add_option("--out", run_out, "output directory")->required();
    add_common(run);

    std::string eval_pred, eval_truth;
    std::optional<int> eval_classes, eval_ignore;
    auto* eval = app.add_subcommand("eval", "mIoU of predicted label maps against ground truth");
    eval->add_option("--pred", eval_pred, "label PNG or directory")->required();
    eval->add_option("--truth", eval_truth, "label PNG or directory")->required();
    eval->add_option("--classes", eval_classes, "class count (inferred otherwise)");
    eval->add_option("--ignore", eval_ignore, "void class id excluded from scoring");

    std::string report_in;
    bool report_json = false;
    auto* report = app.add_subcommand("report", "Print a run report as a component table");
    report->add_option("input", report_in, "report.json written by run")->required();
    report->add_flag("--json", report_json, "print JSON instead of the table");

    std::string synth_out, synth_pattern = "rggb";
    int synth_w = 256, synth_h = 256, synth_frames = 20, synth_square = 64;
    std::vector<int> synth_velocity{2, 2};
    std::uint64_t synth_seed = 1;
    std::optional<int> synth_cut;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic translating-square sequence with labels");
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--width", synth_w);
    synth_cmd->add_option("--height", synth_h);
    synth_cmd->add_option("--frames", synth_frames);
    synth_cmd->add_option("--velocity", synth_velocity, "dx dy in pixels per frame")->expected(2);
    synth_cmd->add_option("--square", synth_square);
    synth_cmd->add_option("--seed", synth_seed);
    synth_cmd->add_option("--pattern", synth_pattern);
    synth_cmd->add_option("--cut", synth_cut, "frame index of a scene cut");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*mosaic) return cmd_mosaic(mosaic_in, mosaic_pattern, mosaic_out);
        if (*estimate) return cmd_estimate(est_cur, est_ref, common, est_dev, est_out);
        if (*propagate) return cmd_propagate(prop_labels, prop_field, prop_scale, prop_out);
        if (*run) {
            run_opts.frames = run_frames;
            run_opts.keyframe_labels = run_kf;
            run_opts.out = run_out;
            if (run_truth) run_opts.truth = *run_truth;
            if (run_weights) run_opts.weights = *run_weights;
            return cmd_run(run_opts, common);
        }
        if (*eval) return cmd_eval(eval_pred, eval_truth, eval_classes, eval_ignore);
        if (*report) return cmd_report(report_in, report_json);
        if (*synth_cmd) {
            return cmd_synth(synth_out, synth_w, synth_h, synth_frames, synth_velocity, synth_square, synth_seed,
                             synth_pattern, synth_cut);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
