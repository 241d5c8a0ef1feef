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

#include "xaib/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <queue>

namespace xaib {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kAllBackground: return "AllBackground";
    case ErrorCode::kInvalidGamma: return "InvalidGamma";
    case ErrorCode::kNonSquare: return "NonSquare";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kBadVersion: return "BadVersion";
    case ErrorCode::kShapeOverflow: return "ShapeOverflow";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDegenerateSamples: return "DegenerateSamples";
    case ErrorCode::kTooManySegments: return "TooManySegments";
    case ErrorCode::kRuleMismatch: return "RuleMismatch";
    case ErrorCode::kEmptyList: return "EmptyList";
    case ErrorCode::kEmptyMask: return "EmptyMask";
    case ErrorCode::kNoRois: return "NoRois";
    case ErrorCode::kMissingFile: return "MissingFile";
    case ErrorCode::kBadLabel: return "BadLabel";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

namespace {

void CheckDims(int height, int width, std::size_t length, const char* what) {
  if (height < 1 || width < 1) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": dimensions must be positive, got " +
             std::to_string(height) + "x" + std::to_string(width));
  }
  if (length != static_cast<std::size_t>(height) * width) {
    Fail(ErrorCode::kInvalidArgument,
         std::string(what) + ": data length " + std::to_string(length) +
             " does not match " + std::to_string(height) + "x" +
             std::to_string(width));
  }
}

void CheckUnitRange(std::span<const double> data, const char* what) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double v = data[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      Fail(ErrorCode::kOutOfRange, std::string(what) + ": value " +
                                       std::to_string(v) + " at index " +
                                       std::to_string(i) +
                                       " outside [0,1]");
    }
  }
}

}  // namespace

GrayImage::GrayImage(int height, int width, std::vector<double> data)
    : shape_{height, width}, data_(std::move(data)) {
  CheckDims(height, width, data_.size(), "GrayImage");
  CheckUnitRange(data_, "GrayImage");
}

GrayImage GrayImage::Filled(int height, int width, double value) {
  return GrayImage(height, width,
                   std::vector<double>(static_cast<std::size_t>(
                                           std::max(height, 0)) *
                                           std::max(width, 0),
                                       value));
}

GrayImage GrayImage::Clamped(int height, int width, std::vector<double> data) {
  for (double& v : data) {
    if (std::isnan(v)) {
      Fail(ErrorCode::kOutOfRange, "GrayImage: NaN intensity");
    }
    v = std::clamp(v, 0.0, 1.0);
  }
  return GrayImage(height, width, std::move(data));
}

double GrayImage::Mean() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0) /
         static_cast<double>(data_.size());
}

BinaryMask::BinaryMask(int height, int width, std::vector<std::uint8_t> data)
    : shape_{height, width}, data_(std::move(data)) {
  CheckDims(height, width, data_.size(), "BinaryMask");
  for (auto& v : data_) v = v != 0 ? 1 : 0;
}

BinaryMask BinaryMask::Empty(int height, int width) {
  return BinaryMask(height, width,
                    std::vector<std::uint8_t>(
                        static_cast<std::size_t>(std::max(height, 0)) *
                        std::max(width, 0)));
}

std::size_t BinaryMask::Count() const {
  return static_cast<std::size_t>(
      std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

Heatmap::Heatmap(int height, int width, std::vector<double> data)
    : shape_{height, width}, data_(std::move(data)) {
  CheckDims(height, width, data_.size(), "Heatmap");
  CheckUnitRange(data_, "Heatmap");
  const double mx = Max();
  if (mx != 0.0 && mx != 1.0) {
    Fail(ErrorCode::kOutOfRange,
         "Heatmap: nonzero map must have maximum 1, got " +
             std::to_string(mx));
  }
}

Heatmap Heatmap::FromNonnegative(int height, int width,
                                 std::vector<double> values) {
  double mx = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      Fail(ErrorCode::kOutOfRange, "Heatmap: negative or non-finite value");
    }
    mx = std::max(mx, v);
  }
  if (mx > 0.0) {
    for (double& v : values) v /= mx;
  }
  return Heatmap(height, width, std::move(values));
}

double Heatmap::Max() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

Segmentation::Segmentation(int height, int width, std::vector<int> labels,
                           int num_segments)
    : shape_{height, width},
      labels_(std::move(labels)),
      num_segments_(num_segments) {
  CheckDims(height, width, labels_.size(), "Segmentation");
  if (num_segments < 1) {
    Fail(ErrorCode::kInvalidArgument, "Segmentation: no segments");
  }
  std::vector<std::size_t> seen(num_segments, 0);
  for (int l : labels_) {
    if (l < 0 || l >= num_segments) {
      Fail(ErrorCode::kOutOfRange,
           "Segmentation: label " + std::to_string(l) + " out of range");
    }
    ++seen[l];
  }
  for (int s = 0; s < num_segments; ++s) {
    if (seen[s] == 0) {
      Fail(ErrorCode::kInvalidArgument,
           "Segmentation: segment " + std::to_string(s) + " is empty");
    }
  }
  // Each segment must be a single 4-connected region: flood from the first
  // pixel of every segment and compare the reached count with its size.
  std::vector<std::uint8_t> visited(labels_.size(), 0);
  std::vector<std::uint8_t> started(num_segments, 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < labels_.size(); ++start) {
    const int seg = labels_[start];
    if (started[seg]) continue;
    started[seg] = 1;
    std::size_t reached = 0;
    stack.assign(1, start);
    visited[start] = 1;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++reached;
      const int r = static_cast<int>(p / width);
      const int c = static_cast<int>(p % width);
      const int nr[4] = {r - 1, r + 1, r, r};
      const int nc[4] = {c, c, c - 1, c + 1};
      for (int k = 0; k < 4; ++k) {
        if (nr[k] < 0 || nr[k] >= height || nc[k] < 0 || nc[k] >= width) {
          continue;
        }
        const std::size_t q = static_cast<std::size_t>(nr[k]) * width + nc[k];
        if (!visited[q] && labels_[q] == seg) {
          visited[q] = 1;
          stack.push_back(q);
        }
      }
    }
    if (reached != seen[seg]) {
      Fail(ErrorCode::kInvalidArgument,
           "Segmentation: segment " + std::to_string(seg) +
               " is not 4-connected");
    }
  }
}

BinaryMask Segmentation::SegmentMask(int segment) const {
  std::vector<std::uint8_t> data(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    data[i] = labels_[i] == segment ? 1 : 0;
  }
  return BinaryMask(shape_.height, shape_.width, std::move(data));
}

std::vector<std::size_t> Segmentation::SegmentSizes() const {
  std::vector<std::size_t> sizes(num_segments_, 0);
  for (int l : labels_) ++sizes[l];
  return sizes;
}

std::string_view LabelName(Label label) {
  return label == Label::kBenign ? "benign" : "malignant";
}

Label ParseLabel(std::string_view text) {
  std::string lower(text);
  for (char& ch : lower) {
    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  if (lower == "benign") return Label::kBenign;
  if (lower == "malignant") return Label::kMalignant;
  Fail(ErrorCode::kBadLabel, "unknown label '" + std::string(text) + "'");
}

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::NextU64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  return Mix64(state_);
}

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::Below(std::uint64_t bound) {
  if (bound == 0) Fail(ErrorCode::kInvalidArgument, "Rng::Below(0)");
  // Rejection keeps the distribution exactly uniform.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % bound;
}

std::uint64_t DeriveSeed(std::uint64_t master_seed, std::string_view sample_id,
                         std::uint64_t run_index) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : sample_id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t s = Mix64(master_seed ^ 0x6a09e667f3bcc909ULL);
  s = Mix64(s ^ h);
  s = Mix64(s ^ (run_index + 0x3c6ef372fe94f82bULL));
  return s;
}

}  // namespace xaib
