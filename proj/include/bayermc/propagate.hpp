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

#include "bayermc/fme.hpp"
#include "bayermc/frame.hpp"

namespace bayermc {

/// Motion-compensates a reference result map block by block:
/// out(y, x) = ref(y + scale * dy, x + scale * dx), source clamped to the
/// frame. Pure integer copies. The field must cover the labels (its grid may
/// overhang into padding).
LabelMap predict_labels(const LabelMap& ref_labels, const MotionField& field, int scale);

/// Uses field.scale.
LabelMap predict_labels(const LabelMap& ref_labels, const MotionField& field);

} // namespace bayermc
