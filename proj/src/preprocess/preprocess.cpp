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

#include "xaib/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xaib/raster.hpp"

namespace xaib::preprocess {

namespace {

constexpr int kHistBins = 256;

std::size_t CountChanged(std::span<const double> a, std::span<const double> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

struct GaborKernel {
  int half = 0;
  std::vector<double> weights;  // (2*half+1)^2, row-major
};

GaborKernel MakeEvenGabor(double theta_rad, double wavelength) {
  const double sigma = 0.5 * wavelength;
  const double gamma = 0.5;  // elongation along the line
  GaborKernel k;
  k.half = static_cast<int>(std::ceil(2.0 * sigma));
  const int size = 2 * k.half + 1;
  k.weights.resize(static_cast<std::size_t>(size) * size);
  const double ct = std::cos(theta_rad);
  const double st = std::sin(theta_rad);
  double mean = 0.0;
  for (int y = -k.half; y <= k.half; ++y) {
    for (int x = -k.half; x <= k.half; ++x) {
      const double xr = x * ct + y * st;
      const double yr = -x * st + y * ct;
      const double g =
          std::exp(-(xr * xr + gamma * gamma * yr * yr) / (2 * sigma * sigma)) *
          std::cos(2.0 * std::numbers::pi * xr / wavelength);
      k.weights[static_cast<std::size_t>(y + k.half) * size + (x + k.half)] = g;
      mean += g;
    }
  }
  mean /= static_cast<double>(k.weights.size());
  double positive = 0.0;
  for (double& w : k.weights) {
    w -= mean;
    if (w > 0) positive += w;
  }
  for (double& w : k.weights) w /= positive;
  return k;
}

}  // namespace

void PreprocessConfig::Validate() const {
  auto bad = [](const std::string& what) { Fail(ErrorCode::kConfig, what); };
  if (!(binarize_threshold >= 0.0 && binarize_threshold < 1.0)) {
    bad("binarize_threshold must lie in [0,1)");
  }
  if (!(opening_radius >= 0.0)) bad("opening_radius must be >= 0");
  if (!(gamma > 0.0)) bad("gamma must be > 0");
  if (!(clahe_clip_limit >= 1.0)) bad("clahe_clip_limit must be >= 1");
  if (clahe_tile_rows < 1 || clahe_tile_cols < 1) bad("clahe_tile_grid must be >= 1");
  if (gabor_orientations_deg.empty()) bad("gabor_orientations must be nonempty");
  if (!(gabor_wavelength >= 2.0)) bad("gabor_wavelength must be >= 2");
  if (target_height < 1 || target_width < 1) bad("target_size must be >= 1");
  if (border_band < 1 ||
      2 * border_band >= std::min(target_height, target_width)) {
    bad("border_band must satisfy 1 <= band < min(target)/2");
  }
}

GrayImage RemoveArtifacts(const GrayImage& image, const PreprocessConfig& cfg) {
  const Shape shape = image.shape();
  const auto px = image.data();
  std::vector<std::uint8_t> fg(px.size());
  bool any = false;
  for (std::size_t i = 0; i < px.size(); ++i) {
    fg[i] = px[i] > cfg.binarize_threshold;
    any = any || fg[i];
  }
  if (!any) {
    Fail(ErrorCode::kAllBackground,
         "remove_artifacts: no pixel exceeds threshold " +
             std::to_string(cfg.binarize_threshold));
  }
  const auto opened = raster::Open(fg, shape, cfg.opening_radius);
  const auto comps = raster::ConnectedComponents(opened, shape, 8);
  if (comps.sizes.empty()) {
    Fail(ErrorCode::kAllBackground,
         "remove_artifacts: foreground vanishes under opening radius " +
             std::to_string(cfg.opening_radius));
  }
  // First maximum wins, i.e. ties go to the lowest label.
  const int keep = static_cast<int>(
      std::max_element(comps.sizes.begin(), comps.sizes.end()) -
      comps.sizes.begin());
  // Opening also shaves the kept blob's rim; foreground within the opening
  // radius of the kept component is restored.
  std::vector<std::uint8_t> kept(px.size());
  for (std::size_t i = 0; i < kept.size(); ++i) kept[i] = comps.labels[i] == keep;
  const auto reach = raster::Dilate(kept, shape, cfg.opening_radius);
  std::vector<double> out(px.begin(), px.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(fg[i] && reach[i])) out[i] = 0.0;
  }
  return GrayImage(shape.height, shape.width, std::move(out));
}

Shape BorderBand(Shape image, const PreprocessConfig& cfg) {
  const auto scaled = [&](int size, int target) {
    const int band = static_cast<int>(
        std::lround(static_cast<double>(cfg.border_band) * size / target));
    return std::clamp(band, 1, std::max(1, (size - 1) / 2));
  };
  return {scaled(image.height, cfg.target_height),
          scaled(image.width, cfg.target_width)};
}

std::vector<double> GaborLineResponse(const GrayImage& image,
                                      const PreprocessConfig& cfg) {
  const int h = image.height();
  const int w = image.width();
  const auto px = image.data();
  std::vector<double> best(px.size(), -std::numeric_limits<double>::infinity());
  for (double deg : cfg.gabor_orientations_deg) {
    const auto k = MakeEvenGabor(deg * std::numbers::pi / 180.0,
                                 cfg.gabor_wavelength);
    const int size = 2 * k.half + 1;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int dy = -k.half; dy <= k.half; ++dy) {
          const int rr = r + dy;
          if (rr < 0 || rr >= h) continue;  // zero padding
          const double* row = px.data() + static_cast<std::size_t>(rr) * w;
          const double* kw =
              k.weights.data() + static_cast<std::size_t>(dy + k.half) * size;
          for (int dx = -k.half; dx <= k.half; ++dx) {
            const int cc = c + dx;
            if (cc < 0 || cc >= w) continue;
            acc += kw[dx + k.half] * row[cc];
          }
        }
        auto& b = best[static_cast<std::size_t>(r) * w + c];
        b = std::max(b, acc);
      }
    }
  }
  return best;
}

GrayImage RemoveBorderLines(const GrayImage& image,
                            const PreprocessConfig& cfg) {
  const Shape shape = image.shape();
  const int h = shape.height;
  const int w = shape.width;
  const auto px = image.data();
  const Shape band = BorderBand(shape, cfg);
  auto in_band = [&](int r, int c) {
    return r < band.height || r >= h - band.height || c < band.width ||
           c >= w - band.width;
  };

  bool any_bright = false;
  for (int r = 0; r < h && !any_bright; ++r) {
    for (int c = 0; c < w; ++c) {
      if (in_band(r, c) &&
          px[static_cast<std::size_t>(r) * w + c] > cfg.binarize_threshold) {
        any_bright = true;
        break;
      }
    }
  }
  if (!any_bright) return image;

  // Intensity threshold and Gabor response together mark candidates.
  const auto response = GaborLineResponse(image, cfg);
  constexpr double kRelativeResponse = 0.5;
  std::vector<std::uint8_t> candidate(px.size(), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      candidate[i] = in_band(r, c) && px[i] > cfg.binarize_threshold &&
                     response[i] >= kRelativeResponse * px[i];
    }
  }

  // Keep only elongated, thin candidate components.
  const auto comps = raster::ConnectedComponents(candidate, shape, 8);
  const std::size_t n = comps.sizes.size();
  std::vector<int> rmin(n, h), rmax(n, -1), cmin(n, w), cmax(n, -1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int l = comps.labels[static_cast<std::size_t>(r) * w + c];
      if (l < 0) continue;
      rmin[l] = std::min(rmin[l], r);
      rmax[l] = std::max(rmax[l], r);
      cmin[l] = std::min(cmin[l], c);
      cmax[l] = std::max(cmax[l], c);
    }
  }
  const double min_length = 3.0 * cfg.gabor_wavelength;
  std::vector<std::uint8_t> is_line(n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    const double extent =
        std::max(rmax[l] - rmin[l] + 1, cmax[l] - cmin[l] + 1);
    is_line[l] = extent >= min_length &&
                 static_cast<double>(comps.sizes[l]) <=
                     cfg.gabor_wavelength * extent;
  }
  std::vector<std::uint8_t> lines(px.size(), 0);
  bool found = false;
  for (std::size_t i = 0; i < px.size(); ++i) {
    const int l = comps.labels[i];
    if (l >= 0 && is_line[l]) {
      lines[i] = 1;
      found = true;
    }
  }
  if (!found) return image;

  // Dilation catches the soft flanks of the line.
  const auto grown = raster::Dilate(lines, shape, 1.5);
  std::vector<double> out(px.begin(), px.end());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (grown[i] && in_band(r, c)) out[i] = 0.0;
    }
  }
  return GrayImage(h, w, std::move(out));
}

GrayImage GammaCorrect(const GrayImage& image, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    Fail(ErrorCode::kInvalidGamma,
         "gamma must be positive and finite, got " + std::to_string(gamma));
  }
  std::vector<double> out(image.data().begin(), image.data().end());
  for (double& v : out) v = std::pow(v, gamma);
  return GrayImage::Clamped(image.height(), image.width(), std::move(out));
}

GrayImage Clahe(const GrayImage& image, const PreprocessConfig& cfg) {
  const int h = image.height();
  const int w = image.width();
  const int rows = cfg.clahe_tile_rows;
  const int cols = cfg.clahe_tile_cols;
  // Tiles cover a padded canvas; padding mirrors the image (reflect-101).
  const int tile_h = (h + rows - 1) / rows;
  const int tile_w = (w + cols - 1) / cols;
  const auto px = image.data();
  auto bin_of = [](double v) {
    return std::min(kHistBins - 1, static_cast<int>(v * (kHistBins - 1) + 0.5));
  };
  auto reflect = [](int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * n - 2 - i;
    return i;
  };

  const double area = static_cast<double>(tile_h) * tile_w;
  const double clip =
      std::max(1.0, cfg.clahe_clip_limit * area / kHistBins);
  std::vector<double> luts(static_cast<std::size_t>(rows) * cols * kHistBins);
  std::vector<double> hist(kHistBins);
  for (int tr = 0; tr < rows; ++tr) {
    for (int tc = 0; tc < cols; ++tc) {
      std::fill(hist.begin(), hist.end(), 0.0);
      for (int r = tr * tile_h; r < (tr + 1) * tile_h; ++r) {
        const int rr = reflect(r, h);
        for (int c = tc * tile_w; c < (tc + 1) * tile_w; ++c) {
          hist[bin_of(px[static_cast<std::size_t>(rr) * w + reflect(c, w)])] += 1;
        }
      }
      double excess = 0.0;
      for (double& b : hist) {
        if (b > clip) {
          excess += b - clip;
          b = clip;
        }
      }
      const double share = excess / kHistBins;
      double* lut = luts.data() +
                    (static_cast<std::size_t>(tr) * cols + tc) * kHistBins;
      double cdf = 0.0;
      for (int b = 0; b < kHistBins; ++b) {
        cdf += hist[b] + share;
        lut[b] = std::min(1.0, cdf / area);
      }
    }
  }

  std::vector<double> out(px.size());
  for (int r = 0; r < h; ++r) {
    const double ty = (r + 0.5) / tile_h - 0.5;
    const int ty0 = std::clamp(static_cast<int>(std::floor(ty)), 0, rows - 1);
    const int ty1 = std::min(ty0 + 1, rows - 1);
    const double fy = std::clamp(ty - ty0, 0.0, 1.0);
    for (int c = 0; c < w; ++c) {
      const double tx = (c + 0.5) / tile_w - 0.5;
      const int tx0 = std::clamp(static_cast<int>(std::floor(tx)), 0, cols - 1);
      const int tx1 = std::min(tx0 + 1, cols - 1);
      const double fx = std::clamp(tx - tx0, 0.0, 1.0);
      const int b = bin_of(px[static_cast<std::size_t>(r) * w + c]);
      auto lut = [&](int ty_, int tx_) {
        return luts[(static_cast<std::size_t>(ty_) * cols + tx_) * kHistBins + b];
      };
      out[static_cast<std::size_t>(r) * w + c] =
          (1 - fy) * ((1 - fx) * lut(ty0, tx0) + fx * lut(ty0, tx1)) +
          fy * ((1 - fx) * lut(ty1, tx0) + fx * lut(ty1, tx1));
    }
  }
  return GrayImage::Clamped(h, w, std::move(out));
}

GrayImage Resize(const GrayImage& image, Shape target) {
  if (target.height < 1 || target.width < 1) {
    Fail(ErrorCode::kInvalidArgument, "resize: target must be >= 1x1");
  }
  return GrayImage::Clamped(
      target.height, target.width,
      raster::ResizeBilinear(image.data(), image.shape(), target));
}

BinaryMask ResizeMask(const BinaryMask& mask, Shape target) {
  std::vector<double> values(mask.data().begin(), mask.data().end());
  const auto resized = raster::ResizeBilinear(values, mask.shape(), target);
  std::vector<std::uint8_t> out(resized.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = resized[i] >= 0.5;
  return BinaryMask(target.height, target.width, std::move(out));
}

PipelineResult RunPipeline(const GrayImage& image, const PreprocessConfig& cfg) {
  cfg.Validate();
  StageLog log;
  log.input_shape = image.shape();
  const GrayImage no_artifacts = RemoveArtifacts(image, cfg);
  log.artifacts_zeroed = CountChanged(image.data(), no_artifacts.data());
  const GrayImage cleaned = RemoveBorderLines(no_artifacts, cfg);
  log.line_pixels_zeroed = CountChanged(no_artifacts.data(), cleaned.data());
  const GrayImage gamma = GammaCorrect(cleaned, cfg.gamma);
  log.gamma_changed = CountChanged(cleaned.data(), gamma.data());
  GrayImage enhanced = Clahe(gamma, cfg);
  {
    std::vector<double> masked(enhanced.data().begin(), enhanced.data().end());
    for (std::size_t i = 0; i < masked.size(); ++i) {
      if (cleaned.data()[i] == 0.0) masked[i] = 0.0;
    }
    enhanced = GrayImage(enhanced.height(), enhanced.width(), std::move(masked));
  }
  log.clahe_changed = CountChanged(gamma.data(), enhanced.data());
  GrayImage resized =
      Resize(enhanced, Shape{cfg.target_height, cfg.target_width});
  log.output_shape = resized.shape();
  return {std::move(resized), cleaned, log};
}

GrayImage PreprocessImage(const GrayImage& image, const PreprocessConfig& cfg) {
  return RunPipeline(image, cfg).image;
}

}  // namespace xaib::preprocess
