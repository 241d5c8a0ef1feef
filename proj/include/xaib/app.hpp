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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "xaib/core.hpp"
#include "xaib/explain.hpp"
#include "xaib/maskeval.hpp"
#include "xaib/preprocess.hpp"

namespace xaib::app {

using Json = nlohmann::json;

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kReportSchema = "xaib.report";
inline constexpr int kReportSchemaVersion = 1;

struct TrainSettings {
  int epochs = 10;
  double learning_rate = 0.01;
  // Rescale second-layer filters to unit mean pooled activation first.
  bool calibrate = true;
};

struct LimeSettings {
  int segments = 49;
  explain::LimeConfig config;  // seed is derived per sample
};

struct ShapSettings {
  int segments = 49;
  int permutations = 20;
};

struct MaskSettings {
  maskeval::MaskStrategy heatmap;
  maskeval::AttributionMaskRule lime{maskeval::SegmentRule::kSelected, 5};
  maskeval::AttributionMaskRule shap{maskeval::SegmentRule::kTopK, 5};
};

struct EvaluationSettings {
  int stability_runs = 10;
  // Segments for the exact Shapley stability probe (at most 12).
  int stability_shap_segments = 8;
  // Test samples explained and scored; 0 means all.
  int max_explained = 0;
  bool consistency = true;
};

struct Paths {
  std::string manifest;
  std::string out_dir = "xaib_out";
};

struct RunConfig {
  std::uint64_t master_seed = 0;
  preprocess::PreprocessConfig preprocess;
  double split_ratio = 0.9;
  TrainSettings train;
  double compactness = 0.1;
  LimeSettings lime;
  ShapSettings shap;
  MaskSettings mask;
  EvaluationSettings evaluation;
  Paths paths;
  // 0 defers to XAIB_JOBS.
  int jobs = 0;

  // Throws kConfig.
  void Validate() const;
};

// Missing keys keep their defaults; unknown keys throw kConfig naming the
// full key path.
RunConfig RunConfigFromJson(const Json& j);
Json RunConfigToJson(const RunConfig& config);
RunConfig LoadRunConfig(const std::filesystem::path& path);

// Reads the manifest, resolving relative paths against its directory. Rows
// sharing an id are merged into one sample whose ROI is the union. Output
// is ordered by id. Throws kMissingFile naming the row, kBadLabel and
// kDimensionMismatch.
std::vector<LabeledSample> Ingest(const std::filesystem::path& manifest);

// Writes images (and ROIs) as PNGs under `dir` plus dir/manifest.csv.
std::filesystem::path WriteDataset(const std::vector<LabeledSample>& samples,
                                   const std::filesystem::path& dir);

// Runs `fn(i)` for i in [0, n) on up to `jobs` threads; rethrows the first
// failure after all workers stop.
void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Reads XAIB_JOBS when `jobs` is not positive; defaults to 1.
int ResolveJobs(int jobs);

// Subcommand dispatcher shared by the C API and the CLI. `options` holds the
// subcommand's flags; the result summarises what was written.
Json RunCommand(std::string_view command, const Json& options);

// Full pipeline; writes <out_dir>/report.json and returns it.
Json RunAll(const RunConfig& config);

// Empty when `report` conforms to the current report schema.
std::vector<std::string> ValidateReport(const Json& report);

}  // namespace xaib::app
