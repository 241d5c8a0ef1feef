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

#include <algorithm>

#include "xaib/explain.hpp"
#include "xaib/raster.hpp"

namespace xaib::explain {

std::vector<double> GradCamWeights(const model::ActivationBundle& bundle) {
  bundle.Validate();
  const std::size_t plane = static_cast<std::size_t>(bundle.height) * bundle.width;
  std::vector<double> alpha(bundle.channels, 0.0);
  for (int k = 0; k < bundle.channels; ++k) {
    const float* g = bundle.gradients.data() + k * plane;
    double sum = 0.0;
    for (std::size_t i = 0; i < plane; ++i) sum += g[i];
    alpha[k] = sum / static_cast<double>(plane);
  }
  return alpha;
}

Heatmap GradCam(const model::ActivationBundle& bundle, Shape output_size) {
  if (output_size.height < 1 || output_size.width < 1) {
    Fail(ErrorCode::kInvalidArgument, "grad_cam: output size must be positive");
  }
  const std::vector<double> alpha = GradCamWeights(bundle);
  const std::size_t plane = static_cast<std::size_t>(bundle.height) * bundle.width;
  std::vector<double> cam(plane, 0.0);
  for (int k = 0; k < bundle.channels; ++k) {
    if (alpha[k] == 0.0) continue;
    const float* a = bundle.activations.data() + k * plane;
    for (std::size_t i = 0; i < plane; ++i) cam[i] += alpha[k] * a[i];
  }
  for (double& v : cam) v = std::max(v, 0.0);
  std::vector<double> up = raster::ResizeBilinear(
      cam, {bundle.height, bundle.width}, output_size);
  for (double& v : up) v = std::max(v, 0.0);
  return Heatmap::FromNonnegative(output_size.height, output_size.width,
                                  std::move(up));
}

}  // namespace xaib::explain
