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

#include "xaib/app.hpp"

namespace xaib::app {

namespace {

enum class Kind { kObject, kArray, kString, kInteger, kNumber, kBoolean, kNumberOrNull, kBooleanOrNull };

bool Matches(const Json& v, Kind kind) {
  switch (kind) {
    case Kind::kObject:
      return v.is_object();
    case Kind::kArray:
      return v.is_array();
    case Kind::kString:
      return v.is_string();
    case Kind::kInteger:
      return v.is_number_integer();
    case Kind::kNumber:
      return v.is_number();
    case Kind::kBoolean:
      return v.is_boolean();
    case Kind::kNumberOrNull:
      return v.is_number() || v.is_null();
    case Kind::kBooleanOrNull:
      return v.is_boolean() || v.is_null();
  }
  return false;
}

class Checker {
 public:
  explicit Checker(std::vector<std::string>& errors) : errors_(errors) {}

  // Returns the member when present with the right kind, else records an
  // error and returns null.
  const Json* Need(const Json& parent, const std::string& path, const std::string& key, Kind kind) {
    if (!parent.is_object() || !parent.contains(key)) {
      errors_.push_back(path + "." + key + ": missing");
      return nullptr;
    }
    const Json& v = parent.at(key);
    if (!Matches(v, kind)) {
      errors_.push_back(path + "." + key + ": wrong type");
      return nullptr;
    }
    return &v;
  }

  void Check(bool ok, const std::string& message) {
    if (!ok) errors_.push_back(message);
  }

 private:
  std::vector<std::string>& errors_;
};

void CheckHausdorff(Checker& c, const Json& h, const std::string& path) {
  c.Need(h, path, "method", Kind::kString);
  const Json* scored = c.Need(h, path, "scored", Kind::kInteger);
  const Json* per = c.Need(h, path, "per_sample", Kind::kArray);
  const Json* mean = c.Need(h, path, "mean", Kind::kNumberOrNull);
  const Json* lo = c.Need(h, path, "min", Kind::kNumberOrNull);
  const Json* hi = c.Need(h, path, "max", Kind::kNumberOrNull);
  if (per) {
    for (std::size_t i = 0; i < per->size(); ++i) {
      const std::string p = path + ".per_sample[" + std::to_string(i) + "]";
      const Json& row = (*per)[i];
      c.Need(row, p, "id", Kind::kString);
      const Json* skipped = c.Need(row, p, "skipped", Kind::kBoolean);
      if (skipped && !skipped->get<bool>()) {
        if (const Json* d = c.Need(row, p, "distance", Kind::kNumber)) {
          c.Check(d->get<double>() >= 0.0, p + ".distance: negative");
        }
      } else if (skipped) {
        c.Need(row, p, "reason", Kind::kString);
      }
    }
  }
  if (scored && mean && lo && hi && scored->get<int>() > 0) {
    c.Check(mean->is_number() && lo->is_number() && hi->is_number(),
            path + ": scored samples need mean/min/max");
    if (mean->is_number() && lo->is_number() && hi->is_number()) {
      const double m = mean->get<double>();
      c.Check(lo->get<double>() <= m + 1e-9 && m <= hi->get<double>() + 1e-9,
              path + ": mean outside [min, max]");
    }
  }
}

void CheckStability(Checker& c, const Json& s, const std::string& path) {
  const Json* runs = c.Need(s, path, "runs", Kind::kInteger);
  c.Need(s, path, "seeds", Kind::kArray);
  const Json* det = c.Need(s, path, "deterministic", Kind::kBoolean);
  c.Need(s, path, "distinct_masks", Kind::kInteger);
  c.Need(s, path, "mean_pairwise_iou", Kind::kNumberOrNull);
  const Json* iou = c.Need(s, path, "pairwise_iou", Kind::kArray);
  c.Need(s, path, "pairwise_hausdorff", Kind::kArray);
  if (!runs || !iou) return;
  const auto n = static_cast<std::size_t>(runs->get<int>());
  c.Check(iou->size() == n, path + ".pairwise_iou: expected runs x runs");
  bool all_one = true;
  for (std::size_t i = 0; i < iou->size(); ++i) {
    const Json& row = (*iou)[i];
    if (!row.is_array() || row.size() != n) {
      c.Check(false, path + ".pairwise_iou: ragged matrix");
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      const Json& v = row[j];
      if (!v.is_number()) {
        c.Check(false, path + ".pairwise_iou: non-numeric entry");
        return;
      }
      if (v.get<double>() != 1.0) all_one = false;
      if (i == j) c.Check(v.get<double>() == 1.0, path + ".pairwise_iou: diagonal must be 1");
    }
  }
  if (det) c.Check(det->get<bool>() == all_one, path + ": deterministic flag disagrees with IoU matrix");
}

}  // namespace

std::vector<std::string> ValidateReport(const Json& report) {
  std::vector<std::string> errors;
  Checker c(errors);
  if (!report.is_object()) return {"report: must be an object"};
  if (const Json* schema = c.Need(report, "report", "schema", Kind::kString)) {
    c.Check(*schema == kReportSchema, "report.schema: unexpected value");
  }
  if (const Json* v = c.Need(report, "report", "schema_version", Kind::kInteger)) {
    c.Check(v->get<int>() == kReportSchemaVersion, "report.schema_version: unsupported");
  }
  c.Need(report, "report", "xaib_version", Kind::kString);
  if (const Json* cfg = c.Need(report, "report", "config", Kind::kObject)) {
    c.Need(*cfg, "report.config", "master_seed", Kind::kInteger);
  }
  if (const Json* seeds = c.Need(report, "report", "seeds", Kind::kObject)) {
    for (const char* k : {"master", "split", "init", "train"}) c.Need(*seeds, "report.seeds", k, Kind::kInteger);
  }
  if (const Json* stages = c.Need(report, "report", "stages", Kind::kObject)) {
    const std::string sp = "report.stages";
    for (const char* k : {"ingest", "preprocess", "split", "augment", "train", "explain", "hausdorff", "stability"}) {
      c.Need(*stages, sp, k, Kind::kObject);
    }
    if (stages->contains("train") && (*stages)["train"].is_object()) {
      if (const Json* acc = c.Need((*stages)["train"], sp + ".train", "test_accuracy", Kind::kNumber)) {
        c.Check(acc->get<double>() >= 0.0 && acc->get<double>() <= 1.0,
                sp + ".train.test_accuracy: outside [0,1]");
      }
    }
    if (stages->contains("hausdorff") && (*stages)["hausdorff"].is_object()) {
      for (const char* m : {"gradcam", "lime", "shap"}) {
        if (const Json* h = c.Need((*stages)["hausdorff"], sp + ".hausdorff", m, Kind::kObject)) {
          CheckHausdorff(c, *h, sp + ".hausdorff." + m);
        }
      }
    }
    if (stages->contains("stability") && (*stages)["stability"].is_object()) {
      c.Need((*stages)["stability"], sp + ".stability", "sample", Kind::kString);
      for (const char* m : {"gradcam", "lime", "shap_exact"}) {
        if (const Json* s = c.Need((*stages)["stability"], sp + ".stability", m, Kind::kObject)) {
          CheckStability(c, *s, sp + ".stability." + m);
        }
      }
    }
    if (stages->contains("consistency")) {
      const Json& cons = (*stages)["consistency"];
      c.Need(cons, sp + ".consistency", "pairs", Kind::kArray);
      c.Need(cons, sp + ".consistency", "mean_iou", Kind::kNumberOrNull);
    }
  }
  if (const Json* summary = c.Need(report, "report", "summary", Kind::kObject)) {
    c.Need(*summary, "report.summary", "test_accuracy", Kind::kNumber);
    if (const Json* means = c.Need(*summary, "report.summary", "mean_hausdorff", Kind::kObject)) {
      for (const char* m : {"gradcam", "lime", "shap"}) {
        c.Need(*means, "report.summary.mean_hausdorff", m, Kind::kNumberOrNull);
      }
    }
    if (const Json* flags = c.Need(*summary, "report.summary", "stability", Kind::kObject)) {
      for (const char* m : {"gradcam", "lime", "shap_exact"}) {
        if (const Json* f = c.Need(*flags, "report.summary.stability", m, Kind::kString)) {
          c.Check(*f == "deterministic" || *f == "nondeterministic",
                  std::string("report.summary.stability.") + m + ": unknown flag");
        }
      }
    }
    c.Need(*summary, "report.summary", "gradcam_below_lime", Kind::kBooleanOrNull);
  }
  if (const Json* ref = c.Need(report, "report", "reference", Kind::kObject)) {
    c.Need(*ref, "report.reference", "mean_hausdorff", Kind::kObject);
  }
  return errors;
}

}  // namespace xaib::app
