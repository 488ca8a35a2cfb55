/*
 * Copyright 2026 The palml Authors.
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

#include "palml/resample.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "palml/parallel.h"
#include "palml/random.h"
#include "palml/stats.h"

namespace palml {
namespace {

struct Neighbor {
  std::size_t index;
  double distance;
};

// k nearest rows of `pool` to pool[i] (excluding itself), by Euclidean
// distance; ties go to the lower row index.
std::vector<Neighbor> nearest(const Matrix& x, std::span<const std::size_t> pool,
                              std::size_t i, std::size_t k) {
  std::vector<Neighbor> all;
  all.reserve(pool.size());
  for (std::size_t j : pool) {
    if (j == pool[i]) continue;
    all.push_back({j, std::sqrt(squared_distance(x.row(pool[i]), x.row(j)))});
  }
  const auto by_distance = [](const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance ||
           (a.distance == b.distance && a.index < b.index);
  };
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), by_distance);
  all.resize(k);
  return all;
}

void interpolate(std::span<const double> a, std::span<const double> b,
                 double u, std::span<double> out) {
  for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j] + u * (b[j] - a[j]);
}

}  // namespace

void validate(const SmoteConfig& cfg) {
  if (cfg.k_neighbors < 1) {
    throw Error(ErrorCode::kInvalidConfig, "smote k_neighbors must be >= 1");
  }
}

void validate(const SmognConfig& cfg) {
  if (cfg.k_neighbors < 1) {
    throw Error(ErrorCode::kInvalidConfig, "smogn k_neighbors must be >= 1");
  }
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(cfg.noise_fraction)) {
    throw Error(ErrorCode::kInvalidConfig, "smogn noise_fraction must be in (0,1)");
  }
  if (!open_unit(cfg.safe_distance_quantile)) {
    throw Error(ErrorCode::kInvalidConfig,
                "smogn safe_distance_quantile must be in (0,1)");
  }
  // Thresholds above 1 are accepted: they select nothing.
  if (!(cfg.relevance_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig,
                "smogn relevance_threshold must be > 0");
  }
}

SmoteResult smote_balance(const Matrix& x, std::span<const int> y,
                          const SmoteConfig& cfg, Diagnostics* diagnostics) {
  validate(cfg);
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and rows differ in length");
  }
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  if (members.size() < 2) {
    throw Error(ErrorCode::kSingleClass, "SMOTE needs at least two classes");
  }
  std::size_t majority = 0;
  for (const auto& [label, rows] : members) {
    majority = std::max(majority, rows.size());
  }

  struct ClassJob {
    int label;
    const std::vector<std::size_t>* rows;
    std::size_t need;
  };
  std::vector<ClassJob> jobs;
  for (const auto& [label, rows] : members) {
    const std::size_t need = majority - rows.size();
    if (need == 0) continue;
    if (rows.size() < 2) {
      throw Error(ErrorCode::kTooFewSamples,
                  "class " + std::to_string(label) + " has " +
                      std::to_string(rows.size()) +
                      " row(s); SMOTE needs at least 2");
    }
    if (cfg.k_neighbors > rows.size() - 1) {
      warn_to(diagnostics, "SMOTE: k reduced to " +
                               std::to_string(rows.size() - 1) + " for class " +
                               std::to_string(label));
    }
    jobs.push_back({label, &rows, need});
  }

  struct ClassOutput {
    Matrix x;
    std::vector<SyntheticOrigin> origins;
  };
  std::vector<ClassOutput> outputs(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const ClassJob& job = jobs[j];
    const auto& rows = *job.rows;
    const std::size_t k = std::min(cfg.k_neighbors, rows.size() - 1);
    std::vector<std::vector<Neighbor>> knn(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) knn[i] = nearest(x, rows, i, k);

    Rng rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(job.label)});
    ClassOutput& out = outputs[j];
    out.x = Matrix(job.need, x.cols());
    out.origins.reserve(job.need);
    for (std::size_t s = 0; s < job.need; ++s) {
      const std::size_t i = uniform_index(rng, rows.size());
      const std::size_t nn = knn[i][uniform_index(rng, k)].index;
      const double u = uniform01(rng);
      interpolate(x.row(rows[i]), x.row(nn), u, out.x.row(s));
      out.origins.push_back({rows[i], nn, u, false});
    }
  });

  SmoteResult result;
  result.num_original = x.rows();
  result.x = x;
  result.y.assign(y.begin(), y.end());
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (std::size_t s = 0; s < outputs[j].x.rows(); ++s) {
      result.x.append_row(outputs[j].x.row(s));
      result.y.push_back(jobs[j].label);
    }
    result.origins.insert(result.origins.end(), outputs[j].origins.begin(),
                          outputs[j].origins.end());
  }
  return result;
}

std::vector<double> relevance(std::span<const double> y) {
  if (y.empty()) throw Error(ErrorCode::kEmptyDataset, "relevance of empty target");
  const double med = median(y);
  const double iqr = interquartile_range(y);
  std::vector<double> out(y.size(), 0.0);
  if (iqr <= 0.0) return out;
  const double reach = 1.5 * iqr;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out[i] = std::min(1.0, std::abs(y[i] - med) / reach);
  }
  return out;
}

SmognResult smogn_resample(const Matrix& x, std::span<const double> y,
                           const SmognConfig& cfg, Diagnostics* diagnostics) {
  validate(cfg);
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::kLengthMismatch, "targets and rows differ in length");
  }
  if (x.rows() < cfg.k_neighbors + 1) {
    throw Error(ErrorCode::kTooFewSamples,
                "SMOGN needs at least k_neighbors + 1 rows");
  }

  SmognResult result;
  result.num_original = x.rows();
  result.x = x;
  result.y.assign(y.begin(), y.end());

  const std::vector<double> rel = relevance(y);
  const double med = median(y);
  // Rare rows split into the low and high tail; neighbors are searched
  // within the same tail so interpolation never crosses the bulk.
  std::vector<std::size_t> low;
  std::vector<std::size_t> high;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (rel[i] >= cfg.relevance_threshold) (y[i] < med ? low : high).push_back(i);
  }
  result.num_rare = low.size() + high.size();
  if (result.num_rare == 0) {
    result.nothing_rare = true;
    warn_to(diagnostics, "SMOGN: NothingRare, no row reaches relevance " +
                             std::to_string(cfg.relevance_threshold) +
                             "; input returned unchanged");
    return result;
  }

  const std::size_t n_common = x.rows() - result.num_rare;
  std::size_t per_rare = cfg.synthetic_per_rare;
  if (per_rare == 0) {
    const double ratio =
        (static_cast<double>(n_common) - static_cast<double>(result.num_rare)) /
        static_cast<double>(result.num_rare);
    per_rare = static_cast<std::size_t>(std::max(1.0, std::round(ratio)));
  }

  std::vector<double> feature_std(x.cols());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    feature_std[c] = standard_deviation(x.column(c));
  }
  const double target_std = standard_deviation(y);

  struct Job {
    const std::vector<std::size_t>* pool;
    std::size_t position;
  };
  std::vector<Job> jobs;
  for (const auto* pool : {&low, &high}) {
    for (std::size_t p = 0; p < pool->size(); ++p) jobs.push_back({pool, p});
  }
  // Jobs are ordered by tail; emit in row order for readability.
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return (*a.pool)[a.position] < (*b.pool)[b.position];
  });

  struct RowOutput {
    Matrix x;
    std::vector<double> y;
    std::vector<SyntheticOrigin> origins;
  };
  std::vector<RowOutput> outputs(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t j) {
    const auto& pool = *jobs[j].pool;
    const std::size_t i = pool[jobs[j].position];
    const std::size_t k = std::min(cfg.k_neighbors, pool.size() - 1);
    const std::vector<Neighbor> knn = nearest(x, pool, jobs[j].position, k);
    double safe = 0.0;
    if (!knn.empty()) {
      std::vector<double> d;
      for (const auto& nb : knn) d.push_back(nb.distance);
      safe = quantile(d, cfg.safe_distance_quantile);
    }

    Rng rng = make_rng(cfg.seed, {static_cast<std::uint64_t>(i)});
    RowOutput& out = outputs[j];
    out.x = Matrix(per_rare, x.cols());
    for (std::size_t s = 0; s < per_rare; ++s) {
      auto dst = out.x.row(s);
      const Neighbor* nb = knn.empty() ? nullptr : &knn[uniform_index(rng, k)];
      if (nb != nullptr && nb->distance <= safe) {
        const double u = uniform01(rng);
        interpolate(x.row(i), x.row(nb->index), u, dst);
        out.y.push_back(y[i] + u * (y[nb->index] - y[i]));
        out.origins.push_back({i, nb->index, u, false});
      } else {
        const auto src = x.row(i);
        for (std::size_t c = 0; c < x.cols(); ++c) {
          dst[c] = src[c] + cfg.noise_fraction * feature_std[c] *
                                standard_normal(rng);
        }
        out.y.push_back(y[i] + cfg.noise_fraction * target_std *
                                   standard_normal(rng));
        out.origins.push_back({i, i, 0.0, true});
      }
    }
  });

  for (auto& out : outputs) {
    for (std::size_t s = 0; s < out.x.rows(); ++s) result.x.append_row(out.x.row(s));
    result.y.insert(result.y.end(), out.y.begin(), out.y.end());
    result.origins.insert(result.origins.end(), out.origins.begin(),
                          out.origins.end());
  }
  return result;
}

}  // namespace palml
