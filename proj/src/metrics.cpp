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

#include "bayermc/metrics.hpp"

#include <cmath>
#include <limits>

namespace bayermc {

Confusion confusion_matrix(const LabelMap& pred, const LabelMap& truth, int num_classes,
                           std::optional<int> ignore_class) {
    if (pred.width() != truth.width() || pred.height() != truth.height()) {
        throw ShapeError("miou: prediction is " + std::to_string(pred.width()) + "x" + std::to_string(pred.height()) +
                         ", truth is " + std::to_string(truth.width()) + "x" + std::to_string(truth.height()));
    }
    if (num_classes < 1) throw ShapeError("miou: num_classes must be positive");
    Confusion counts = Confusion::Zero(num_classes, num_classes);
    const auto& p = pred.classes();
    const auto& t = truth.classes();
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        const int tc = t(i);
        if (ignore_class && tc == *ignore_class) continue;
        const int pc = p(i);
        if (tc >= num_classes || pc >= num_classes) {
            throw ShapeError("miou: class id exceeds num_classes " + std::to_string(num_classes));
        }
        ++counts(tc, pc);
    }
    return counts;
}

Eigen::ArrayXd class_iou(const Confusion& confusion) {
    const Eigen::Index n = confusion.rows();
    Eigen::ArrayXd iou(n);
    for (Eigen::Index c = 0; c < n; ++c) {
        const auto inter = confusion(c, c);
        const auto uni = confusion.row(c).sum() + confusion.col(c).sum() - inter;
        iou[c] = uni == 0 ? std::numeric_limits<double>::quiet_NaN()
                          : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return iou;
}

double miou(const Confusion& confusion) {
    long double sum = 0.0L;
    int present = 0;
    for (Eigen::Index c = 0; c < confusion.rows(); ++c) {
        const auto inter = confusion(c, c);
        const auto uni = confusion.row(c).sum() + confusion.col(c).sum() - inter;
        if (uni == 0) continue;
        sum += static_cast<long double>(inter) / static_cast<long double>(uni);
        ++present;
    }
    return present == 0 ? 1.0 : static_cast<double>(sum / present);
}

double miou(const LabelMap& pred, const LabelMap& truth, int num_classes, std::optional<int> ignore_class) {
    return miou(confusion_matrix(pred, truth, num_classes, ignore_class));
}

std::string to_string(Component c) {
    switch (c) {
        case Component::Backbone: return "backbone";
        case Component::Fme: return "fme";
        case Component::MvRefine: return "mv_refine";
        case Component::Cabr: return "cabr";
        case Component::Prediction: return "prediction";
    }
    return "unknown";
}

std::string display_name(Component c) {
    switch (c) {
        case Component::Backbone: return "Backbone";
        case Component::Fme: return "FME";
        case Component::MvRefine: return "MV-Refine";
        case Component::Cabr: return "CaBR-Net";
        case Component::Prediction: return "Prediction";
    }
    return "unknown";
}

void FlopLedger::add(Component c, std::uint64_t flops) {
    if (c == Component::Prediction && flops != 0) {
        throw Error("ledger: prediction is a pure memory copy and cannot record flops");
    }
    entries_[static_cast<std::size_t>(c)] += flops;
}

void FlopLedger::add_backbone_frame(double gflops) {
    entries_[static_cast<std::size_t>(Component::Backbone)] += static_cast<std::uint64_t>(std::llround(gflops * 1e9));
    ++backbone_invocations_;
}

std::uint64_t FlopLedger::total() const {
    std::uint64_t t = 0;
    for (auto v : entries_) t += v;
    return t;
}

std::uint64_t FlopLedger::pipeline_total() const { return total() - get(Component::Backbone); }

FlopLedger& FlopLedger::operator+=(const FlopLedger& other) {
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
    backbone_invocations_ += other.backbone_invocations_;
    return *this;
}

double ledger_report(const FlopLedger& ledger, double backbone_gflops_per_keyframe, std::size_t frames,
                     std::size_t keyframes) {
    if (frames == 0) throw Error("ledger_report: no frames");
    const double pipeline_gflops = static_cast<double>(ledger.pipeline_total()) / 1e9;
    return (static_cast<double>(keyframes) * backbone_gflops_per_keyframe + pipeline_gflops) /
           static_cast<double>(frames);
}

} // namespace bayermc
