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

#include "bayermc/propagate.hpp"

#include <algorithm>

#include "bayermc/parallel.hpp"

namespace bayermc {

LabelMap predict_labels(const LabelMap& ref_labels, const MotionField& field, int scale) {
    field.validate();
    if (scale != 1 && scale != 2) throw ShapeError("predict_labels: scale must be 1 or 2");
    const int w = ref_labels.width();
    const int h = ref_labels.height();
    const int bs = field.block_size;
    if (field.grid_w * bs < w || field.grid_h * bs < h) {
        throw ShapeError("predict_labels: motion field grid " + std::to_string(field.grid_w) + "x" +
                         std::to_string(field.grid_h) + " of " + std::to_string(bs) + "px blocks does not cover " +
                         std::to_string(w) + "x" + std::to_string(h) + " labels");
    }
    const ClassPlane& src = ref_labels.classes();
    ClassPlane out(h, w);
    parallel_for(field.size(), [&](std::size_t i) {
        const int x0 = static_cast<int>(i % static_cast<std::size_t>(field.grid_w)) * bs;
        const int y0 = static_cast<int>(i / static_cast<std::size_t>(field.grid_w)) * bs;
        const MotionVector v = field.mv[i];
        for (int y = y0; y < std::min(y0 + bs, h); ++y) {
            const int sy = std::clamp(y + scale * v.dy, 0, h - 1);
            for (int x = x0; x < std::min(x0 + bs, w); ++x) {
                out(y, x) = src(sy, std::clamp(x + scale * v.dx, 0, w - 1));
            }
        }
    });
    return LabelMap(std::move(out), ref_labels.num_classes());
}

LabelMap predict_labels(const LabelMap& ref_labels, const MotionField& field) {
    return predict_labels(ref_labels, field, field.scale);
}

} // namespace bayermc
