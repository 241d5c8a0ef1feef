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

#include "xaib/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace xaib::io {

namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> ReadPngAs(const fs::path& path, png_uint_32 format,
                                    int& height, int& width) {
  if (!fs::exists(path)) {
    Fail(ErrorCode::kMissingFile, "no such file: " + path.string());
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    Fail(ErrorCode::kIo, "cannot read PNG " + path.string() + ": " +
                             image.message);
  }
  image.format = format;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    Fail(ErrorCode::kIo, "cannot decode PNG " + path.string() + ": " + message);
  }
  height = static_cast<int>(image.height);
  width = static_cast<int>(image.width);
  return buffer;
}

void WritePng(const fs::path& path, png_uint_32 format, int height, int width,
              const std::uint8_t* pixels) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.format = format;
  image.height = static_cast<png_uint_32>(height);
  image.width = static_cast<png_uint_32>(width);
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels, 0,
                               nullptr)) {
    Fail(ErrorCode::kIo, "cannot write PNG " + path.string() + ": " +
                             image.message);
  }
}

std::uint8_t ToByte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  for (auto& f : fields) {
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.pop_back();
    while (!f.empty() && f.front() == ' ') f.erase(f.begin());
  }
  return fields;
}

}  // namespace

GrayImage LoadGrayPng(const fs::path& path) {
  int h = 0, w = 0;
  const auto bytes = ReadPngAs(path, PNG_FORMAT_GRAY, h, w);
  std::vector<double> data(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) data[i] = bytes[i] / 255.0;
  return GrayImage(h, w, std::move(data));
}

void SaveGrayPng(const GrayImage& image, const fs::path& path) {
  std::vector<std::uint8_t> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(),
                 ToByte);
  WritePng(path, PNG_FORMAT_GRAY, image.height(), image.width(), bytes.data());
}

BinaryMask LoadMaskPng(const fs::path& path) {
  int h = 0, w = 0;
  auto bytes = ReadPngAs(path, PNG_FORMAT_GRAY, h, w);
  return BinaryMask(h, w, std::move(bytes));
}

void SaveMaskPng(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint8_t> bytes(mask.data().size());
  std::transform(mask.data().begin(), mask.data().end(), bytes.begin(),
                 [](std::uint8_t v) { return v ? std::uint8_t{255} : std::uint8_t{0}; });
  WritePng(path, PNG_FORMAT_GRAY, mask.height(), mask.width(), bytes.data());
}

void SaveHeatmapPng(const Heatmap& heatmap, const fs::path& path) {
  std::vector<std::uint8_t> bytes(heatmap.data().size());
  std::transform(heatmap.data().begin(), heatmap.data().end(), bytes.begin(),
                 ToByte);
  WritePng(path, PNG_FORMAT_GRAY, heatmap.height(), heatmap.width(),
           bytes.data());
}

void SaveRgbPng(int height, int width, const std::vector<std::uint8_t>& rgb,
                const fs::path& path) {
  if (rgb.size() != static_cast<std::size_t>(height) * width * 3) {
    Fail(ErrorCode::kInvalidArgument, "RGB buffer size mismatch");
  }
  WritePng(path, PNG_FORMAT_RGB, height, width, rgb.data());
}

std::array<std::uint8_t, 3> BlueToRed(double t) {
  t = std::clamp(t, 0.0, 1.0);
  // blue -> cyan -> yellow -> red
  double r, g, b;
  if (t < 1.0 / 3.0) {
    const double u = t * 3.0;
    r = 0.0; g = u; b = 1.0;
  } else if (t < 2.0 / 3.0) {
    const double u = (t - 1.0 / 3.0) * 3.0;
    r = u; g = 1.0; b = 1.0 - u;
  } else {
    const double u = (t - 2.0 / 3.0) * 3.0;
    r = 1.0; g = 1.0 - u; b = 0.0;
  }
  return {ToByte(r), ToByte(g), ToByte(b)};
}

std::vector<std::uint8_t> RenderOverlay(const GrayImage& image,
                                        const Heatmap& heatmap,
                                        double opacity) {
  if (image.shape() != heatmap.shape()) {
    Fail(ErrorCode::kShapeMismatch, "overlay: heatmap and image differ in size");
  }
  std::vector<std::uint8_t> rgb(image.data().size() * 3);
  for (std::size_t i = 0; i < image.data().size(); ++i) {
    const double base = image.data()[i] * 255.0;
    const auto color = BlueToRed(heatmap.data()[i]);
    for (int ch = 0; ch < 3; ++ch) {
      const double v = (1.0 - opacity) * base + opacity * color[ch];
      rgb[i * 3 + ch] = static_cast<std::uint8_t>(
          std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return rgb;
}

std::vector<ManifestRow> ReadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kMissingFile, "cannot open manifest " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCode::kConfig, "manifest " + path.string() + " is empty");
  }
  const auto header = SplitCsvLine(line);
  const std::vector<std::string> expected = {"id", "image_path", "label",
                                             "roi_path"};
  if (header != expected) {
    Fail(ErrorCode::kConfig, "manifest " + path.string() +
                                 ": header must be id,image_path,label,roi_path");
  }
  std::vector<ManifestRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() == 3) fields.emplace_back();
    if (fields.size() != 4) {
      Fail(ErrorCode::kConfig, "manifest " + path.string() + " line " +
                                   std::to_string(line_no) +
                                   ": expected 4 fields");
    }
    rows.push_back({fields[0], fields[1], fields[2], fields[3], line_no});
  }
  return rows;
}

void WriteManifest(const std::vector<ManifestRow>& rows, const fs::path& path) {
  std::ostringstream out;
  out << "id,image_path,label,roi_path\n";
  for (const auto& r : rows) {
    out << r.id << ',' << r.image_path << ',' << r.label << ',' << r.roi_path
        << '\n';
  }
  WriteText(path, out.str());
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kMissingFile, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace xaib::io
