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

#include <exception>
#include <mutex>
#include <thread>

#include "xaib/explain.hpp"

namespace xaib::explain {

InterpretableInstance InterpretableInstance::Make(GrayImage image,
                                                  Segmentation segmentation) {
  if (image.shape() != segmentation.shape()) {
    Fail(ErrorCode::kShapeMismatch,
         "interpretable instance: segmentation does not match image shape");
  }
  InterpretableInstance inst{std::move(image), std::move(segmentation), {}, 0.0};
  inst.active.assign(inst.segmentation.num_segments(), 1);
  inst.fill_value = inst.image.Mean();
  return inst;
}

GrayImage Perturb(const InterpretableInstance& instance,
                  std::span<const std::uint8_t> z) {
  if (z.size() != static_cast<std::size_t>(instance.size())) {
    Fail(ErrorCode::kLengthMismatch,
         "perturb: coalition has " + std::to_string(z.size()) +
             " entries, segmentation has " + std::to_string(instance.size()));
  }
  const auto labels = instance.segmentation.labels();
  const auto src = instance.image.data();
  std::vector<double> out(src.begin(), src.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!z[labels[i]]) out[i] = instance.fill_value;
  }
  return GrayImage(instance.image.height(), instance.image.width(),
                   std::move(out));
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kLime:
      return "lime";
    case Method::kShapExact:
      return "shap_exact";
    case Method::kShapSampled:
      return "shap_sampled";
  }
  return "unknown";
}

std::vector<double> RenderSegmentValues(const Segmentation& segmentation,
                                        std::span<const double> values) {
  if (values.size() != static_cast<std::size_t>(segmentation.num_segments())) {
    Fail(ErrorCode::kLengthMismatch,
         "render: attribution length does not match segment count");
  }
  const auto labels = segmentation.labels();
  std::vector<double> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = values[labels[i]];
  return out;
}

CoalitionFn ClassifierValue(const model::Classifier& classifier,
                            const InterpretableInstance& instance,
                            Label target_class) {
  return [&classifier, &instance, target_class](std::span<const std::uint8_t> z) {
    return classifier.PredictProba(Perturb(instance, z))[static_cast<int>(target_class)];
  };
}

std::vector<double> EvaluateCoalitions(
    const CoalitionFn& fn, const std::vector<std::vector<std::uint8_t>>& zs,
    int jobs) {
  std::vector<double> out(zs.size());
  const int workers =
      std::max(1, std::min<int>(jobs, static_cast<int>(zs.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < zs.size(); ++i) out[i] = fn(zs[i]);
    return out;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < zs.size(); i += workers) out[i] = fn(zs[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace xaib::explain
