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

#include <doctest.h>

#include <filesystem>

#include "oracles.hpp"
#include "xaib/image_io.hpp"

using namespace xaib;
namespace fs = std::filesystem;

namespace {

fs::path Scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("xaib_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("gray PNG round trip is exact on 8-bit values") {
  const fs::path dir = Scratch("png");
  std::vector<double> v(256);
  for (int i = 0; i < 256; ++i) v[i] = i / 255.0;
  const GrayImage img(16, 16, v);
  io::SaveGrayPng(img, dir / "a.png");
  CHECK(io::LoadGrayPng(dir / "a.png") == img);
}

TEST_CASE("mask PNG round trip") {
  const fs::path dir = Scratch("mask");
  const auto m = oracle::RandomMask(13, 29, 0.4, 3);
  io::SaveMaskPng(m, dir / "m.png");
  CHECK(io::LoadMaskPng(dir / "m.png") == m);
}

TEST_CASE("loading a missing file reports it") {
  try {
    io::LoadGrayPng("/nonexistent/xaib.png");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingFile);
    CHECK(std::string(e.what()).find("/nonexistent/xaib.png") != std::string::npos);
  }
}

TEST_CASE("manifest parsing") {
  const fs::path dir = Scratch("manifest");
  io::WriteText(dir / "m.csv", "id,image_path,label,roi_path\na,a.png,Benign,\nb,b.png,malignant,r.png\n\n");
  const auto rows = io::ReadManifest(dir / "m.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].id == "a");
  CHECK(rows[0].roi_path.empty());
  CHECK(rows[1].roi_path == "r.png");
  CHECK(rows[1].line == 3);
  io::WriteText(dir / "bad.csv", "id,image,label\n");
  CHECK_THROWS_AS(io::ReadManifest(dir / "bad.csv"), Error);
  io::WriteManifest(rows, dir / "again.csv");
  const auto again = io::ReadManifest(dir / "again.csv");
  CHECK(again.size() == 2);
  CHECK(again[1].image_path == "b.png");
}

TEST_CASE("overlay colormap runs blue to red") {
  CHECK(io::BlueToRed(0.0) == std::array<std::uint8_t, 3>{0, 0, 255});
  CHECK(io::BlueToRed(1.0) == std::array<std::uint8_t, 3>{255, 0, 0});
  const GrayImage img = GrayImage::Filled(2, 2, 0.0);
  const Heatmap h(2, 2, {0.0, 0.0, 0.0, 1.0});
  const auto rgb = io::RenderOverlay(img, h, 0.4);
  CHECK(rgb.size() == 12);
  CHECK(rgb[9] == 102);  // 0.4 * 255 red over black
}
