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

#include "xaib/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "xaib/image_io.hpp"

namespace xaib::synthetic {

namespace fs = std::filesystem;

void SyntheticSpec::Validate() const {
  if (count_per_class < 0) Fail(ErrorCode::kConfig, "synthetic: negative count");
  if (image_size < 64) Fail(ErrorCode::kConfig, "synthetic: image size must be >= 64");
  if (!(blob_radius_min > 0.0) || blob_radius_max < blob_radius_min ||
      blob_radius_max > image_size * 0.16) {
    Fail(ErrorCode::kConfig, "synthetic: blob radius range must satisfy 0 < min <= max <= 0.16*size");
  }
  for (double p : {text_probability, line_probability}) {
    if (!(p >= 0.0 && p <= 1.0)) Fail(ErrorCode::kConfig, "synthetic: probabilities must lie in [0,1]");
  }
}

namespace {

double Quantize(double v) { return std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0; }

std::string SampleId(Label label, int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04d", std::string(LabelName(label)).c_str(), index);
  return buf;
}

// 5x7 block glyphs drawn with 2-pixel strokes.
void DrawText(std::vector<double>& img, std::vector<std::uint8_t>& mask, int n,
              int top, int left, int glyphs, Rng& rng) {
  for (int g = 0; g < glyphs; ++g) {
    const int gx = left + g * 12;
    for (int cell = 0; cell < 35; ++cell) {
      if (!rng.Bernoulli(0.45)) continue;
      const int r = top + (cell / 5) * 2;
      const int c = gx + (cell % 5) * 2;
      for (int dr = 0; dr < 2; ++dr) {
        for (int dc = 0; dc < 2; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= n || cc < 0 || cc >= n) continue;
          img[rr * n + cc] = 1.0;
          mask[rr * n + cc] = 1;
        }
      }
    }
  }
}

}  // namespace

SyntheticSample Synthesize(const SyntheticSpec& spec, Label label, int index) {
  spec.Validate();
  const int n = spec.image_size;
  const std::string id = SampleId(label, index);
  Rng rng(DeriveSeed(spec.seed, id, 0));
  std::vector<double> img(static_cast<std::size_t>(n) * n, 0.0);
  std::vector<std::uint8_t> roi(img.size(), 0), text(img.size(), 0), line(img.size(), 0);

  // Breast tissue: an ellipse with gentle low-frequency shading.
  const double cy = n * 0.5, cx = n * 0.5;
  const double ay = n * 0.38, ax = n * 0.40;
  const double ph1 = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double ph2 = rng.Uniform(0.0, 2.0 * std::numbers::pi);
  const double base = rng.Uniform(0.34, 0.40);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double u = (r + 0.5 - cy) / ay, v = (c + 0.5 - cx) / ax;
      const double rho = std::sqrt(u * u + v * v);
      if (rho > 1.0) continue;
      // Soft skin line over the outer 15% of the radius.
      const double t = std::clamp((1.0 - rho) / 0.15, 0.0, 1.0);
      const double falloff = t * t * (3.0 - 2.0 * t);
      img[r * n + c] = falloff * (base + 0.04 * std::sin(6.0 * r / n * std::numbers::pi + ph1) +
                                  0.04 * std::cos(5.0 * c / n * std::numbers::pi + ph2));
    }
  }

  // Lesion, fully inside its half of the breast.
  const double radius = rng.Uniform(spec.blob_radius_min, spec.blob_radius_max);
  const double off = radius + 2.0 + rng.Uniform(0.0, 0.04) * n;
  const double by = cy + rng.Uniform(-0.08, 0.08) * n;
  const double bx = label == Label::kBenign ? cx - off : cx + off;
  // Striped lesion: horizontal bands for benign, vertical for malignant.
  const int band = 3;
  const int phase = static_cast<int>(rng.Below(2 * band));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double dy = r + 0.5 - by, dx = c + 0.5 - bx;
      if (dy * dy + dx * dx > radius * radius) continue;
      roi[r * n + c] = 1;
      const int t = (label == Label::kBenign ? r : c) + phase;
      img[r * n + c] = (t / band) % 2 == 0 ? 0.92 : 0.55;
    }
  }

  // Text block in a corner, outside the breast.
  if (rng.Bernoulli(spec.text_probability)) {
    const int corner = static_cast<int>(rng.Below(4));
    const int top = corner < 2 ? 6 : n - 6 - 14;
    const int left = corner % 2 == 0 ? 6 : n - 6 - 4 * 12;
    DrawText(img, text, n, top, left, 4, rng);
  }
  // Two-pixel bright line along one edge.
  if (rng.Bernoulli(spec.line_probability)) {
    const int edge = static_cast<int>(rng.Below(4));
    const int at = 2 + static_cast<int>(rng.Below(3));
    const int from = n / 4, to = n - n / 4;
    for (int t = from; t < to; ++t) {
      for (int w = 0; w < 2; ++w) {
        int r = 0, c = 0;
        switch (edge) {
          case 0: r = at + w; c = t; break;
          case 1: r = n - 1 - at - w; c = t; break;
          case 2: r = t; c = at + w; break;
          default: r = t; c = n - 1 - at - w; break;
        }
        img[r * n + c] = 0.9;
        line[r * n + c] = 1;
      }
    }
  }
  for (double& v : img) v = Quantize(v);

  SyntheticSample out{
      LabeledSample{id, GrayImage(n, n, std::move(img)), label, BinaryMask(n, n, std::move(roi))},
      BinaryMask(n, n, std::move(text)), BinaryMask(n, n, std::move(line))};
  return out;
}

std::vector<SyntheticSample> SynthesizeAll(const SyntheticSpec& spec) {
  spec.Validate();
  std::vector<SyntheticSample> all;
  all.reserve(static_cast<std::size_t>(spec.count_per_class) * 2);
  for (Label label : {Label::kBenign, Label::kMalignant}) {
    for (int i = 0; i < spec.count_per_class; ++i) all.push_back(Synthesize(spec, label, i));
  }
  return all;
}

fs::path WriteSynthetic(const SyntheticSpec& spec, const fs::path& out_dir) {
  const auto all = SynthesizeAll(spec);
  std::vector<io::ManifestRow> rows;
  rows.reserve(all.size());
  for (const auto& s : all) {
    const std::string image_rel = "images/" + s.sample.id + ".png";
    const std::string roi_rel = "rois/" + s.sample.id + ".png";
    io::SaveGrayPng(s.sample.image, out_dir / image_rel);
    io::SaveMaskPng(*s.sample.roi, out_dir / roi_rel);
    rows.push_back({s.sample.id, image_rel, std::string(LabelName(s.sample.label)), roi_rel, 0});
  }
  const fs::path manifest = out_dir / "manifest.csv";
  io::WriteManifest(rows, manifest);
  return manifest;
}

}  // namespace xaib::synthetic
