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

#include "xaib/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "xaib/core.hpp"

namespace xaib::xten {

namespace {

void PutLe(std::vector<std::uint8_t>& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLe(std::span<const std::uint8_t> in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace

std::uint64_t Tensor::NumElements() const {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<std::uint8_t> Encode(const Tensor& tensor) {
  if (tensor.NumElements() != tensor.values.size()) {
    Fail(ErrorCode::kShapeMismatch, "XTEN: dims do not match value count");
  }
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  PutLe(out, kVersion, 4);
  PutLe(out, tensor.dims.size(), 4);
  for (auto d : tensor.dims) PutLe(out, d, 8);
  out.reserve(out.size() + tensor.values.size() * 4);
  for (float f : tensor.values) PutLe(out, std::bit_cast<std::uint32_t>(f), 4);
  return out;
}

Tensor Decode(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < 4) Fail(ErrorCode::kTruncatedFile, "XTEN: missing magic");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
    Fail(ErrorCode::kBadMagic, "XTEN: bad magic bytes");
  }
  if (bytes.size() < 12) Fail(ErrorCode::kTruncatedFile, "XTEN: truncated header");
  const auto version = static_cast<std::uint32_t>(GetLe(bytes, 4, 4));
  if (version != kVersion) {
    Fail(ErrorCode::kBadVersion,
         "XTEN: unsupported version " + std::to_string(version));
  }
  const auto ndim = static_cast<std::uint32_t>(GetLe(bytes, 8, 4));
  if (ndim > kMaxDims) {
    Fail(ErrorCode::kShapeOverflow, "XTEN: ndim " + std::to_string(ndim) +
                                        " exceeds " + std::to_string(kMaxDims));
  }
  std::size_t pos = 12;
  if (bytes.size() < pos + 8ull * ndim) {
    Fail(ErrorCode::kTruncatedFile, "XTEN: truncated dims");
  }
  Tensor t;
  std::uint64_t count = 1;
  constexpr std::uint64_t kLimit = std::numeric_limits<std::uint64_t>::max() / 4;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    const std::uint64_t d = GetLe(bytes, pos, 8);
    pos += 8;
    if (d != 0 && count > kLimit / d) {
      Fail(ErrorCode::kShapeOverflow, "XTEN: element count overflows");
    }
    count *= d;
    t.dims.push_back(d);
  }
  if ((bytes.size() - pos) / 4 < count) {
    Fail(ErrorCode::kTruncatedFile,
         "XTEN: declared " + std::to_string(count) + " elements but only " +
             std::to_string((bytes.size() - pos) / 4) + " present");
  }
  t.values.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    t.values[i] = std::bit_cast<float>(static_cast<std::uint32_t>(GetLe(bytes, pos, 4)));
    pos += 4;
  }
  if (consumed) *consumed = pos;
  return t;
}

void Save(const Tensor& tensor, const std::filesystem::path& path) {
  const auto bytes = Encode(tensor);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Tensor Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return Decode(bytes);
}

}  // namespace xaib::xten
