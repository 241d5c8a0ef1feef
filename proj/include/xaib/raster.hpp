/*
 * Copyright 2026 The xaib Authors.
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

// Low-level raster helpers shared by preprocessing, augmentation and mask
// evaluation. They work on plain row-major buffers plus a Shape.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "xaib/core.hpp"

namespace xaib::raster {

inline constexpr std::int64_t kNoSite = std::numeric_limits<std::int64_t>::max();

// Exact squared Euclidean distance from every pixel to the nearest pixel with
// sites[i] != 0 (Felzenszwalb-Huttenlocher lower envelope, separable). Pixels
// get kNoSite when there are no sites at all.
std::vector<std::int64_t> SquaredDistanceToSites(
    std::span<const std::uint8_t> sites, Shape shape);

struct Components {
  std::vector<int> labels;  // -1 for background, else component index
  std::vector<std::size_t> sizes;
};

// Components are numbered in raster order of their first pixel.
Components ConnectedComponents(std::span<const std::uint8_t> foreground,
                               Shape shape, int connectivity);

// Disk structuring element of the given radius; out-of-image pixels never
// constrain the result.
std::vector<std::uint8_t> Erode(std::span<const std::uint8_t> mask,
                                Shape shape, double radius);
std::vector<std::uint8_t> Dilate(std::span<const std::uint8_t> mask,
                                 Shape shape, double radius);
std::vector<std::uint8_t> Open(std::span<const std::uint8_t> mask, Shape shape,
                               double radius);

// Bilinear sample at fractional (row, col); coordinates outside the grid read
// `fill` for the missing neighbours.
double SampleBilinear(std::span<const double> values, Shape shape, double row,
                      double col, double fill);

// Half-pixel-centre bilinear resampling with edge clamping; identity when the
// target equals the source shape.
std::vector<double> ResizeBilinear(std::span<const double> values, Shape from,
                                   Shape to);

}  // namespace xaib::raster
