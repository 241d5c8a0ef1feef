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

// XTEN tensor exchange format:
//
//   offset  size        field
//   0       4           magic "XTEN"
//   4       4           u32 version (= 1), little-endian
//   8       4           u32 ndim
//   12      8 * ndim    u64 dims, little-endian
//   ...     4 * prod    f32 payload, little-endian, row-major
//
// Activation bundles are two XTEN files (activations, gradients; both
// K x H x W) tied together by a JSON sidecar
// {"activations": <path>, "gradients": <path>, "target_class": <label>}.
// Relative sidecar paths resolve against the sidecar's directory.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace xaib::xten {

inline constexpr char kMagic[4] = {'X', 'T', 'E', 'N'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint32_t kMaxDims = 16;

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> values;

  std::uint64_t NumElements() const;
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

std::vector<std::uint8_t> Encode(const Tensor& tensor);
// Throws kBadMagic, kBadVersion, kShapeOverflow or kTruncatedFile.
// `consumed` (optional) receives the number of bytes read.
Tensor Decode(std::span<const std::uint8_t> bytes,
              std::size_t* consumed = nullptr);

void Save(const Tensor& tensor, const std::filesystem::path& path);
Tensor Load(const std::filesystem::path& path);

}  // namespace xaib::xten
