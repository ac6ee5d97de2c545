/*
 * Copyright 2026 The lungprep Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "lungprep/volume.hpp"

namespace lungprep {

inline constexpr double kDefaultTargetSpacingMm = 1.5;

/// Output extent along one axis: max(1, round(n * in / target)).
std::size_t resampled_extent(std::size_t n, double in_spacing, double target_spacing);

/// Trilinear resampling onto a grid of the given spacing.
///
/// Voxel i sits at physical coordinate i * spacing on every axis (corner
/// aligned). Output sample positions past the last input voxel clamp to the
/// border. Accumulation is in double, results rounded half away from zero.
HuVolume trilinear_resample(const HuVolume& volume, const Spacing& target);

}  // namespace lungprep
