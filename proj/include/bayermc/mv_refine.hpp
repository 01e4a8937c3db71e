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

#include <cstdint>

#include "bayermc/fme.hpp"

namespace bayermc {

struct RefineStats {
    std::size_t replaced = 0;
    std::size_t energy_evaluations = 0;
};

/// Component-wise median of the 3x3 window around (bx, by), clipped to the
/// grid. Even counts take the lower middle value.
MotionVector window_median(const MotionField& field, int bx, int by);

/// Replaces every vector whose Chebyshev distance to its window median
/// exceeds `deviation_threshold` full-resolution pixels (vector units times
/// the field scale) by that median. Medians are read from the
/// input field only. Energies are left untouched.
MotionField refine_mvs(const MotionField& field, int deviation_threshold, RefineStats* stats = nullptr);

/// As above, and recomputes energy and the refinement mask of replaced
/// blocks against the reference. A replacement whose reference window would
/// leave the frame is not applied.
MotionField refine_mvs(const MotionField& field, const SearchSurface& cur, const SearchSurface& ref,
                       const FmeConfig& config, int deviation_threshold, RefineStats* stats = nullptr);

/// Flops of the energy recomputations performed during refinement.
std::uint64_t count_refine_flops(int block_size, std::size_t energy_evaluations);

} // namespace bayermc
