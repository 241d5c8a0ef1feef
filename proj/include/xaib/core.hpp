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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace xaib {

// Every failure raised by the library carries one of these codes. The C API
// maps them one-to-one onto xaib_status.
enum class ErrorCode {
  kInvalidArgument = 1,
  kOutOfRange,
  kAllBackground,
  kInvalidGamma,
  kNonSquare,
  kTooFewSamples,
  kShapeMismatch,
  kEmptyDataset,
  kBadMagic,
  kBadVersion,
  kShapeOverflow,
  kTruncatedFile,
  kLengthMismatch,
  kDegenerateSamples,
  kTooManySegments,
  kRuleMismatch,
  kEmptyList,
  kEmptyMask,
  kNoRois,
  kMissingFile,
  kBadLabel,
  kDimensionMismatch,
  kIo,
  kConfig,
  kInternal,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& message);

// Height-by-width grid shape shared by every raster type.
struct Shape {
  int height = 0;
  int width = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Single-channel image with intensities normalized to [0,1], row-major.
class GrayImage {
 public:
  // Throws kOutOfRange when any value lies outside [0,1] or is not finite,
  // kInvalidArgument when the dimensions are not positive or disagree with
  // the data length.
  GrayImage(int height, int width, std::vector<double> data);
  static GrayImage Filled(int height, int width, double value);
  // Builds an image from values that may have drifted marginally outside
  // [0,1] through arithmetic; clamps instead of rejecting.
  static GrayImage Clamped(int height, int width, std::vector<double> data);

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::span<const double> data() const { return data_; }
  double at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * shape_.width + col];
  }
  double Mean() const;

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

class BinaryMask {
 public:
  BinaryMask(int height, int width, std::vector<std::uint8_t> data);
  static BinaryMask Empty(int height, int width);

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::span<const std::uint8_t> data() const { return data_; }
  bool at(int row, int col) const {
    return data_[static_cast<std::size_t>(row) * shape_.width + col] != 0;
  }
  std::size_t Count() const;
  bool Any() const { return Count() > 0; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  Shape shape_;
  std::vector<std::uint8_t> data_;  // 0 or 1
};

// Relevance map in [0,1]; its maximum is exactly 1 unless it is all zero.
class Heatmap {
 public:
  Heatmap(int height, int width, std::vector<double> data);
  // Divides a nonnegative map by its maximum. An all-zero map stays zero.
  static Heatmap FromNonnegative(int height, int width,
                                 std::vector<double> values);

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  std::span<const double> data() const { return data_; }
  double Max() const;

  friend bool operator==(const Heatmap&, const Heatmap&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Superpixel labelling: every label in [0, num_segments) is used and every
// segment is 4-connected.
class Segmentation {
 public:
  Segmentation(int height, int width, std::vector<int> labels,
               int num_segments);

  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  Shape shape() const { return shape_; }
  int num_segments() const { return num_segments_; }
  std::span<const int> labels() const { return labels_; }
  BinaryMask SegmentMask(int segment) const;
  std::vector<std::size_t> SegmentSizes() const;

 private:
  Shape shape_;
  std::vector<int> labels_;
  int num_segments_;
};

enum class Label { kBenign = 0, kMalignant = 1 };

std::string_view LabelName(Label label);
// Case-insensitive; throws kBadLabel.
Label ParseLabel(std::string_view text);

struct LabeledSample {
  std::string id;
  GrayImage image;
  Label label;
  std::optional<BinaryMask> roi;
};

// SplitMix64: a counter-based generator whose output depends only on the
// seed and the number of draws, so streams are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t NextU64();
  // Uniform on [0,1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Unbiased integer in [0, bound).
  std::uint64_t Below(std::uint64_t bound);
  bool Bernoulli(double p) { return Uniform() < p; }

  // Fisher-Yates; std::shuffle is implementation-defined.
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
};

std::uint64_t Mix64(std::uint64_t x);

// Per-sample, per-run seed; FNV-1a over the id folded through Mix64.
std::uint64_t DeriveSeed(std::uint64_t master_seed, std::string_view sample_id,
                         std::uint64_t run_index);

}  // namespace xaib
