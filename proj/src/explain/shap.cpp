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
#include <bit>
#include <numeric>
#include <unordered_map>

#include "xaib/explain.hpp"

namespace xaib::explain {

namespace {

std::vector<int> Players(std::span<const std::uint8_t> active) {
  std::vector<int> players;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (active[i]) players.push_back(static_cast<int>(i));
  }
  return players;
}

std::vector<std::uint8_t> CoalitionOf(std::uint64_t mask,
                                      const std::vector<int>& players,
                                      std::size_t width) {
  std::vector<std::uint8_t> z(width, 0);
  for (std::size_t p = 0; p < players.size(); ++p) {
    if ((mask >> p) & 1U) z[players[p]] = 1;
  }
  return z;
}

}  // namespace

Attribution ShapExactValues(const CoalitionFn& fn,
                            std::span<const std::uint8_t> active, int jobs) {
  if (active.size() > static_cast<std::size_t>(kMaxExactSegments)) {
    Fail(ErrorCode::kTooManySegments,
         "shap_exact: " + std::to_string(active.size()) +
             " segments exceed the exact limit of " + std::to_string(kMaxExactSegments));
  }
  const std::vector<int> players = Players(active);
  const int m = static_cast<int>(players.size());
  const std::uint64_t subsets = std::uint64_t{1} << m;
  std::vector<std::vector<std::uint8_t>> zs;
  zs.reserve(subsets);
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    zs.push_back(CoalitionOf(mask, players, active.size()));
  }
  const std::vector<double> v = EvaluateCoalitions(fn, zs, jobs);

  // Factorials up to 12! are exact in double.
  std::vector<double> fact(m + 1, 1.0);
  for (int i = 1; i <= m; ++i) fact[i] = fact[i - 1] * i;
  std::vector<double> weight(std::max(m, 1), 0.0);
  for (int s = 0; s < m; ++s) weight[s] = fact[s] * fact[m - s - 1] / fact[m];

  Attribution a;
  a.method = Method::kShapExact;
  a.base_value = v[0];
  a.values.assign(active.size(), 0.0);
  for (int p = 0; p < m; ++p) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    double phi = 0.0;
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      if (mask & bit) continue;
      phi += weight[std::popcount(mask)] * (v[mask | bit] - v[mask]);
    }
    a.values[players[p]] = phi;
  }
  return a;
}

Attribution ShapSampledValues(const CoalitionFn& fn,
                              std::span<const std::uint8_t> active,
                              int num_permutations, std::uint64_t seed,
                              int jobs) {
  if (num_permutations < 1) {
    Fail(ErrorCode::kInvalidArgument, "shap_sampled: need at least one permutation");
  }
  const std::vector<int> players = Players(active);
  const int m = static_cast<int>(players.size());
  if (m > 64) {
    Fail(ErrorCode::kTooManySegments, "shap_sampled: at most 64 present segments");
  }
  // M! when it fits; enumerating every ordering reproduces the exact values.
  bool exhaustive = false;
  std::uint64_t total = 1;
  if (m <= 20) {
    for (int i = 2; i <= m; ++i) total *= static_cast<std::uint64_t>(i);
    exhaustive = static_cast<std::uint64_t>(num_permutations) >= total;
  }
  const std::uint64_t count = exhaustive ? total : static_cast<std::uint64_t>(num_permutations);

  // Permutations are replayed twice from the same stream: once to collect
  // coalitions, once to accumulate marginal contributions.
  auto for_each_permutation = [&](auto&& visit) {
    Rng rng(seed);
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    for (std::uint64_t t = 0; t < count; ++t) {
      if (exhaustive) {
        if (t > 0) std::next_permutation(order.begin(), order.end());
      } else {
        std::iota(order.begin(), order.end(), 0);
        rng.Shuffle(order);
      }
      visit(order);
    }
  };

  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<std::uint64_t> masks;
  auto intern = [&](std::uint64_t mask) {
    if (index.emplace(mask, masks.size()).second) masks.push_back(mask);
  };
  intern(0);
  for_each_permutation([&](const std::vector<int>& order) {
    std::uint64_t mask = 0;
    for (int p : order) {
      mask |= std::uint64_t{1} << p;
      intern(mask);
    }
  });
  std::vector<std::vector<std::uint8_t>> zs;
  zs.reserve(masks.size());
  for (std::uint64_t mask : masks) zs.push_back(CoalitionOf(mask, players, active.size()));
  const std::vector<double> v = EvaluateCoalitions(fn, zs, jobs);

  std::vector<double> sums(m, 0.0);
  for_each_permutation([&](const std::vector<int>& order) {
    std::uint64_t mask = 0;
    double prev = v[index.at(0)];
    for (int p : order) {
      mask |= std::uint64_t{1} << p;
      const double cur = v[index.at(mask)];
      sums[p] += cur - prev;
      prev = cur;
    }
  });

  Attribution a;
  a.method = Method::kShapSampled;
  a.seed = seed;
  a.base_value = v[index.at(0)];
  a.values.assign(active.size(), 0.0);
  for (int p = 0; p < m; ++p) a.values[players[p]] = sums[p] / static_cast<double>(count);
  return a;
}

Attribution ShapExact(const model::Classifier& classifier,
                      const InterpretableInstance& instance,
                      Label target_class, int jobs) {
  if (instance.size() > kMaxExactSegments) {
    Fail(ErrorCode::kTooManySegments,
         "shap_exact: " + std::to_string(instance.size()) +
             " segments exceed the exact limit of " + std::to_string(kMaxExactSegments));
  }
  Attribution a = ShapExactValues(ClassifierValue(classifier, instance, target_class),
                                  instance.active, jobs);
  a.target_class = target_class;
  return a;
}

Attribution ShapSampled(const model::Classifier& classifier,
                        const InterpretableInstance& instance,
                        Label target_class, int num_permutations,
                        std::uint64_t seed, int jobs) {
  Attribution a = ShapSampledValues(ClassifierValue(classifier, instance, target_class),
                                    instance.active, num_permutations, seed, jobs);
  a.target_class = target_class;
  return a;
}

}  // namespace xaib::explain
