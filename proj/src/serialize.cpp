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

#include "bayermc/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bayermc {

using nlohmann::json;

json to_json(const MotionField& field) {
    json mv = json::array();
    for (const auto& v : field.mv) mv.push_back({v.dx, v.dy});
    json energy = json::array();
    for (Eigen::Index i = 0; i < field.energy.size(); ++i) energy.push_back(field.energy[i]);
    json matched = json::array();
    for (Eigen::Index i = 0; i < field.matched.size(); ++i) matched.push_back(static_cast<bool>(field.matched[i]));
    return {{"block_size", field.block_size}, {"grid_w", field.grid_w}, {"grid_h", field.grid_h},
            {"scale", field.scale},           {"mv", mv},               {"energy", energy},
            {"matched", matched}};
}

MotionField motion_field_from_json(const json& j) {
    try {
        MotionField f = MotionField::uniform(j.at("grid_w").get<int>(), j.at("grid_h").get<int>(),
                                             j.at("block_size").get<int>(), j.value("scale", 1));
        const auto& mv = j.at("mv");
        const auto& energy = j.at("energy");
        const auto& matched = j.at("matched");
        if (mv.size() != f.size() || energy.size() != f.size() || matched.size() != f.size()) {
            throw ShapeError("motion field JSON: array lengths differ from grid_w * grid_h");
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            f.mv[i] = {mv[i].at(0).get<int>(), mv[i].at(1).get<int>()};
            f.energy[static_cast<Eigen::Index>(i)] = energy[i].get<double>();
            f.matched[static_cast<Eigen::Index>(i)] = matched[i].get<bool>();
        }
        f.validate();
        return f;
    } catch (const json::exception& e) {
        throw ShapeError(std::string("motion field JSON: ") + e.what());
    }
}

void save_motion_field(const MotionField& field, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << to_json(field).dump() << '\n';
}

MotionField load_motion_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    try {
        return motion_field_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw IoError(path.string(), e.what());
    } catch (const ShapeError& e) {
        throw IoError(path.string(), e.what());
    }
}

Frame energy_map_image(const MotionField& field, int width, int height) {
    field.validate();
    PixelPlane img(height, width);
    for (int y = 0; y < height; ++y) {
        const int by = std::min(y / field.block_size, field.grid_h - 1);
        for (int x = 0; x < width; ++x) {
            const int bx = std::min(x / field.block_size, field.grid_w - 1);
            const double e = field.energy[static_cast<Eigen::Index>(field.index(bx, by))];
            img(y, x) = static_cast<std::uint16_t>(std::lround(std::clamp(e, 0.0, 1.0) * 255.0));
        }
    }
    return Frame(std::move(img), FrameKind::Luma, 255);
}

json to_json(const FrameDecision& d) {
    json j = {{"frame", d.frame_index}, {"kind", to_string(d.kind)}};
    j["reference"] = d.reference_index ? json(*d.reference_index) : json(nullptr);
    j["trigger_statistic"] = d.trigger_statistic;
    return j;
}

FrameDecision decision_from_json(const json& j) {
    FrameDecision d;
    d.frame_index = j.at("frame").get<int>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "key") {
        d.kind = DecisionKind::Key;
    } else if (kind == "nonkey_prev") {
        d.kind = DecisionKind::NonKeyPrevRef;
    } else if (kind == "nonkey_key") {
        d.kind = DecisionKind::NonKeyKeyRef;
    } else {
        throw ShapeError("decision JSON: unknown kind " + kind);
    }
    if (!j.at("reference").is_null()) d.reference_index = j.at("reference").get<int>();
    d.trigger_statistic = j.at("trigger_statistic").get<double>();
    return d;
}

double RunReport::average_gflops() const { return ledger_report(ledger, backbone_gflops, frames, keyframes); }

json to_json(const RunReport& r) {
    json flops;
    for (Component c : kComponents) flops[to_string(c)] = r.ledger.get(c);
    json j = {{"frames", r.frames},
              {"keyframes", r.keyframes},
              {"backbone_gflops_per_keyframe", r.backbone_gflops},
              {"backbone_invocations", r.ledger.backbone_invocations()},
              {"flops", flops},
              {"average_gflops_per_frame", r.average_gflops()},
              {"baseline_gflops_per_frame", r.baseline_gflops()}};
    j["delta_percent"] = r.baseline_gflops() > 0 ? 100.0 * (r.average_gflops() / r.baseline_gflops() - 1.0) : 0.0;
    j["miou"] = r.miou_all ? json(*r.miou_all) : json(nullptr);
    j["miou_nonkey"] = r.miou_nonkey ? json(*r.miou_nonkey) : json(nullptr);
    return j;
}

RunReport report_from_json(const json& j) {
    RunReport r;
    try {
        r.frames = j.at("frames").get<std::size_t>();
        r.keyframes = j.at("keyframes").get<std::size_t>();
        r.backbone_gflops = j.at("backbone_gflops_per_keyframe").get<double>();
        const auto& flops = j.at("flops");
        for (Component c : kComponents) {
            if (c == Component::Backbone) continue;
            r.ledger.add(c, flops.at(to_string(c)).get<std::uint64_t>());
        }
        for (std::size_t k = 0; k < j.at("backbone_invocations").get<std::size_t>(); ++k) {
            r.ledger.add_backbone_frame(r.backbone_gflops);
        }
        if (!j.at("miou").is_null()) r.miou_all = j.at("miou").get<double>();
        if (!j.at("miou_nonkey").is_null()) r.miou_nonkey = j.at("miou_nonkey").get<double>();
    } catch (const json::exception& e) {
        throw ShapeError(std::string("report JSON: ") + e.what());
    }
    return r;
}

std::string report_table(const RunReport& r) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %16s %16s\n", "Component", "GFLOPs (total)", "GFLOPs / frame");
    out << line;
    out << std::string(46, '-') << '\n';
    const double frames = r.frames > 0 ? static_cast<double>(r.frames) : 1.0;
    for (Component c : kComponents) {
        const double g = static_cast<double>(r.ledger.get(c)) / 1e9;
        if (c == Component::Prediction) {
            std::snprintf(line, sizeof line, "%-12s %16s %16s\n", display_name(c).c_str(), "/", "/");
        } else {
            std::snprintf(line, sizeof line, "%-12s %16.6g %16.6g\n", display_name(c).c_str(), g, g / frames);
        }
        out << line;
    }
    out << std::string(46, '-') << '\n';
    std::snprintf(line, sizeof line, "frames %zu, key frames %zu\n", r.frames, r.keyframes);
    out << line;
    std::snprintf(line, sizeof line, "average GFLOPs/frame %.4f vs all-key baseline %.4f (%+.1f%%)\n",
                  r.average_gflops(), r.baseline_gflops(),
                  r.baseline_gflops() > 0 ? 100.0 * (r.average_gflops() / r.baseline_gflops() - 1.0) : 0.0);
    out << line;
    if (r.miou_all) {
        std::snprintf(line, sizeof line, "mIoU all frames %.4f, non-key frames %s\n", *r.miou_all,
                      r.miou_nonkey ? std::to_string(*r.miou_nonkey).c_str() : "n/a");
        out << line;
    }
    return out.str();
}

} // namespace bayermc
