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

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "xaib/app.hpp"
#include "xaib/image_io.hpp"

namespace xaib::app {

namespace fs = std::filesystem;

namespace {

std::string RowContext(const fs::path& manifest, const io::ManifestRow& row) {
  return manifest.string() + " line " + std::to_string(row.line) + " (id '" + row.id + "')";
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

std::vector<LabeledSample> Ingest(const fs::path& manifest) {
  if (!fs::exists(manifest)) {
    Fail(ErrorCode::kMissingFile, "manifest not found: " + manifest.string());
  }
  const auto rows = io::ReadManifest(manifest);
  const fs::path base = manifest.parent_path();

  struct Pending {
    const io::ManifestRow* first = nullptr;
    std::vector<const io::ManifestRow*> rows;
  };
  std::map<std::string, Pending> by_id;
  for (const auto& row : rows) {
    if (row.id.empty()) Fail(ErrorCode::kConfig, RowContext(manifest, row) + ": empty id");
    auto& p = by_id[row.id];
    if (!p.first) p.first = &row;
    p.rows.push_back(&row);
  }

  std::vector<LabeledSample> out;
  out.reserve(by_id.size());
  for (const auto& [id, pending] : by_id) {
    const io::ManifestRow& first = *pending.first;
    Label label;
    try {
      label = ParseLabel(first.label);
    } catch (const Error& e) {
      Fail(ErrorCode::kBadLabel, RowContext(manifest, first) + ": " + e.what());
    }
    const fs::path image_path = Resolve(base, first.image_path);
    if (!fs::exists(image_path)) {
      Fail(ErrorCode::kMissingFile,
           RowContext(manifest, first) + ": image not found: " + image_path.string());
    }
    GrayImage image = io::LoadGrayPng(image_path);
    std::vector<BinaryMask> rois;
    for (const io::ManifestRow* row : pending.rows) {
      if (row->image_path != first.image_path) {
        Fail(ErrorCode::kConfig, RowContext(manifest, *row) +
                                     ": rows sharing an id must name the same image");
      }
      if (ParseLabel(row->label) != label) {
        Fail(ErrorCode::kBadLabel, RowContext(manifest, *row) +
                                       ": conflicting label for a repeated id");
      }
      if (row->roi_path.empty()) continue;
      const fs::path roi_path = Resolve(base, row->roi_path);
      if (!fs::exists(roi_path)) {
        Fail(ErrorCode::kMissingFile,
             RowContext(manifest, *row) + ": ROI not found: " + roi_path.string());
      }
      BinaryMask roi = io::LoadMaskPng(roi_path);
      if (roi.shape() != image.shape()) {
        Fail(ErrorCode::kDimensionMismatch,
             RowContext(manifest, *row) + ": ROI is " + std::to_string(roi.height()) + "x" +
                 std::to_string(roi.width()) + " but the image is " +
                 std::to_string(image.height()) + "x" + std::to_string(image.width()));
      }
      rois.push_back(std::move(roi));
    }
    std::optional<BinaryMask> roi;
    if (!rois.empty()) roi = maskeval::MergeRois(rois);
    out.push_back({id, std::move(image), label, std::move(roi)});
  }
  return out;
}

fs::path WriteDataset(const std::vector<LabeledSample>& samples, const fs::path& dir) {
  std::vector<io::ManifestRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    const std::string image_rel = "images/" + s.id + ".png";
    io::SaveGrayPng(s.image, dir / image_rel);
    std::string roi_rel;
    if (s.roi) {
      roi_rel = "rois/" + s.id + ".png";
      io::SaveMaskPng(*s.roi, dir / roi_rel);
    }
    rows.push_back({s.id, image_rel, std::string(LabelName(s.label)), roi_rel, 0});
  }
  const fs::path manifest = dir / "manifest.csv";
  io::WriteManifest(rows, manifest);
  return manifest;
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (failed.load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace xaib::app
