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

#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "xaib/image_io.hpp"
#include "xaib/model.hpp"
#include "xaib/tensor_io.hpp"

namespace xaib::model {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kModelMagic[4] = {'X', 'M', 'D', 'L'};
constexpr std::uint32_t kModelVersion = 1;

xten::Tensor BundleTensor(const ActivationBundle& b,
                          const std::vector<float>& values) {
  return {{static_cast<std::uint64_t>(b.channels),
           static_cast<std::uint64_t>(b.height),
           static_cast<std::uint64_t>(b.width)},
          values};
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t GetLe(const std::vector<std::uint8_t>& in, std::size_t pos,
                    int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in[pos + i]) << (8 * i);
  return v;
}

}  // namespace

void ActivationBundle::Validate() const {
  if (channels < 1 || height < 1 || width < 1) {
    Fail(ErrorCode::kShapeMismatch, "bundle: K, H and W must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(channels) * height * width;
  if (activations.size() != n || gradients.size() != n) {
    Fail(ErrorCode::kShapeMismatch,
         "bundle: activations and gradients must both hold K*H*W values");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(activations[i]) || !std::isfinite(gradients[i])) {
      Fail(ErrorCode::kOutOfRange, "bundle: non-finite value");
    }
  }
}

void SaveBundle(const ActivationBundle& bundle, const fs::path& sidecar) {
  bundle.Validate();
  const std::string stem = sidecar.stem().string();
  const std::string act_name = stem + ".activations.xten";
  const std::string grad_name = stem + ".gradients.xten";
  const fs::path dir = sidecar.parent_path();
  xten::Save(BundleTensor(bundle, bundle.activations), dir / act_name);
  xten::Save(BundleTensor(bundle, bundle.gradients), dir / grad_name);
  const json j = {{"activations", act_name},
                  {"gradients", grad_name},
                  {"target_class", std::string(LabelName(bundle.target_class))}};
  io::WriteText(sidecar, j.dump(2) + "\n");
}

ActivationBundle LoadBundle(const fs::path& sidecar) {
  json j;
  try {
    j = json::parse(io::ReadText(sidecar));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig,
         "bundle sidecar " + sidecar.string() + ": " + e.what());
  }
  for (const char* key : {"activations", "gradients", "target_class"}) {
    if (!j.contains(key) || !j[key].is_string()) {
      Fail(ErrorCode::kConfig, "bundle sidecar " + sidecar.string() +
                                   ": missing string field '" + key + "'");
    }
  }
  const fs::path dir = sidecar.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : dir / path;
  };
  const auto act = xten::Load(resolve(j["activations"].get<std::string>()));
  const auto grad = xten::Load(resolve(j["gradients"].get<std::string>()));
  if (act.dims.size() != 3 || act.dims != grad.dims) {
    Fail(ErrorCode::kShapeMismatch,
         "bundle: activations and gradients must share a 3-D K x H x W shape");
  }
  for (auto d : act.dims) {
    if (d == 0 || d > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
      Fail(ErrorCode::kShapeOverflow, "bundle: dimension out of range");
    }
  }
  ActivationBundle b;
  b.channels = static_cast<int>(act.dims[0]);
  b.height = static_cast<int>(act.dims[1]);
  b.width = static_cast<int>(act.dims[2]);
  b.activations = act.values;
  b.gradients = grad.values;
  b.target_class = ParseLabel(j["target_class"].get<std::string>());
  b.Validate();
  return b;
}

void SaveModel(const MicroCnn& model, const fs::path& path) {
  MicroCnn copy = model;
  json tensors = json::array();
  std::vector<std::uint8_t> records;
  for (const auto& p : copy.Parameters()) {
    xten::Tensor t;
    t.dims = p.dims;
    t.values.assign(p.values->begin(), p.values->end());
    const auto bytes = xten::Encode(t);
    tensors.push_back({{"name", p.name},
                       {"offset", records.size()},
                       {"bytes", bytes.size()},
                       {"dims", p.dims}});
    records.insert(records.end(), bytes.begin(), bytes.end());
  }
  const json manifest = {
      {"format", "xaib-micro-cnn"},
      {"input_size", model.config().input_size},
      {"conv1_channels", model.config().conv1_channels},
      {"conv2_channels", model.config().conv2_channels},
      {"tensors", tensors}};
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> out(kModelMagic, kModelMagic + 4);
  PutU32(out, kModelVersion);
  PutU64(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), records.begin(), records.end());
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kIo, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

MicroCnn LoadModel(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) Fail(ErrorCode::kMissingFile, "cannot open model " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                        std::istreambuf_iterator<char>());
  if (bytes.size() < 16) Fail(ErrorCode::kTruncatedFile, "model: truncated header");
  if (std::memcmp(bytes.data(), kModelMagic, 4) != 0) {
    Fail(ErrorCode::kBadMagic, "model: bad magic in " + path.string());
  }
  if (GetLe(bytes, 4, 4) != kModelVersion) {
    Fail(ErrorCode::kBadVersion, "model: unsupported archive version");
  }
  const std::uint64_t manifest_len = GetLe(bytes, 8, 8);
  if (manifest_len > bytes.size() - 16) {
    Fail(ErrorCode::kTruncatedFile, "model: truncated manifest");
  }
  json manifest;
  try {
    manifest = json::parse(bytes.begin() + 16,
                           bytes.begin() + 16 + static_cast<std::ptrdiff_t>(manifest_len));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("model manifest: ") + e.what());
  }
  MicroCnnConfig cfg;
  try {
    cfg.input_size = manifest.at("input_size").get<int>();
    cfg.conv1_channels = manifest.at("conv1_channels").get<int>();
    cfg.conv2_channels = manifest.at("conv2_channels").get<int>();
  } catch (const json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("model manifest: ") + e.what());
  }
  MicroCnn model(cfg);
  const std::size_t base = 16 + manifest_len;
  const std::span<const std::uint8_t> payload(bytes.data() + base,
                                              bytes.size() - base);
  for (auto& p : model.Parameters()) {
    const json* entry = nullptr;
    for (const auto& t : manifest.at("tensors")) {
      if (t.at("name") == p.name) entry = &t;
    }
    if (!entry) Fail(ErrorCode::kConfig, "model: missing tensor " + p.name);
    const auto offset = entry->at("offset").get<std::uint64_t>();
    if (offset > payload.size()) {
      Fail(ErrorCode::kTruncatedFile, "model: tensor " + p.name + " past end");
    }
    const auto t = xten::Decode(payload.subspan(offset));
    if (t.dims != p.dims) {
      Fail(ErrorCode::kShapeMismatch, "model: tensor " + p.name + " has wrong shape");
    }
    p.values->assign(t.values.begin(), t.values.end());
  }
  return model;
}

}  // namespace xaib::model
