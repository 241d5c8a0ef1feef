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

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xaib/core.hpp"

namespace xaib::io {

// 8-bit grayscale PNG. Pixels are divided by 255 on load and rounded on save.
GrayImage LoadGrayPng(const std::filesystem::path& path);
void SaveGrayPng(const GrayImage& image, const std::filesystem::path& path);

// Masks are stored as 0/255 grayscale PNGs; any nonzero pixel reads as true.
BinaryMask LoadMaskPng(const std::filesystem::path& path);
void SaveMaskPng(const BinaryMask& mask, const std::filesystem::path& path);

void SaveHeatmapPng(const Heatmap& heatmap, const std::filesystem::path& path);

// Interleaved 8-bit RGB.
void SaveRgbPng(int height, int width, const std::vector<std::uint8_t>& rgb,
                const std::filesystem::path& path);

// Heatmap through a blue-to-red ramp, alpha-blended over the grayscale image.
std::vector<std::uint8_t> RenderOverlay(const GrayImage& image,
                                        const Heatmap& heatmap,
                                        double opacity = 0.4);
std::array<std::uint8_t, 3> BlueToRed(double t);

struct ManifestRow {
  std::string id;
  std::string image_path;
  std::string label;
  std::string roi_path;  // may be empty
  std::size_t line = 0;  // 1-based line in the file
};

// CSV with header `id,image_path,label,roi_path`. Relative paths are kept
// as written; callers resolve them against the manifest directory.
std::vector<ManifestRow> ReadManifest(const std::filesystem::path& path);
void WriteManifest(const std::vector<ManifestRow>& rows,
                   const std::filesystem::path& path);

void WriteText(const std::filesystem::path& path, const std::string& text);
std::string ReadText(const std::filesystem::path& path);

}  // namespace xaib::io
