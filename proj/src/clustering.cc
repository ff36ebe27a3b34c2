// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "medsel/bitplane.h"
#include "medsel/errors.h"

namespace medsel {

namespace {

using u128 = unsigned __int128;

// 192-bit running sum: enough for d squared 64-bit differences as long as
// d < 2^64. Kept as a plain pair so the assignment loop avoids big-int math.
struct DistanceSum {
  u128 lo = 0;
  std::uint64_t hi = 0;

  void Add(u128 v) {
    lo += v;
    if (lo < v) ++hi;
  }
  bool operator<(const DistanceSum& o) const {
    return hi != o.hi ? hi < o.hi : lo < o.lo;
  }
  WideUint ToWide() const {
    WideUint w = hi;
    w <<= 64;
    w += static_cast<std::uint64_t>(lo >> 64);
    w <<= 64;
    w += static_cast<std::uint64_t>(lo);
    return w;
  }
};

DistanceSum RawDistance(std::span<const Word> a, std::span<const Word> b,
                        Metric metric) {
  DistanceSum s;
  const std::size_t d = a.size();
  if (metric == Metric::kSquaredEuclidean) {
    for (std::size_t j = 0; j < d; ++j) {
      const Word diff = a[j] > b[j] ? a[j] - b[j] : b[j] - a[j];
      s.Add(static_cast<u128>(diff) * diff);
    }
  } else {
    for (std::size_t j = 0; j < d; ++j) {
      s.Add(a[j] > b[j] ? a[j] - b[j] : b[j] - a[j]);
    }
  }
  return s;
}

std::span<const Word> CentroidRow(std::span<const Word> centroids,
                                  std::size_t c, std::size_t d) {
  return centroids.subspan(c * d, d);
}

// Mean of `count` words with sum `sum`, rounded half to even.
Word RoundedMean(u128 sum, std::uint64_t count) {
  u128 q = sum / count;
  const u128 rem = sum % count;
  const u128 twice = rem * 2;
  if (twice > count || (twice == count && (q & 1))) ++q;
  return static_cast<Word>(q);
}

bool CentroidsConverged(std::span<const Word> current, std::span<const Word> next,
                        std::size_t k, std::size_t d, Metric metric,
                        double threshold, const FixedPointCodec& codec) {
  if (threshold <= 0.0) return std::equal(current.begin(), current.end(), next.begin());
  for (std::size_t c = 0; c < k; ++c) {
    const double move = DecodeDistance(
        Distance(CentroidRow(current, c, d), CentroidRow(next, c, d), metric),
        codec, metric);
    if (!(move < threshold)) return false;
  }
  return true;
}

// Unbiased draw from [0, bound) by rejection. Unlike the standard
// distributions this gives the same sequence on every standard library.
std::uint64_t UniformBelow(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x = rng();
  while (x < threshold) x = rng();
  return x % bound;
}

ClusterModel RunOnce(const EncodedMatrix& data, const ClusterConfig& cfg,
                     std::uint64_t seed, CostLedger* ledger) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  const std::size_t k = cfg.k;
  const Metric metric = cfg.resolved_metric();

  ClusterModel model;
  model.k = k;
  model.dims = d;
  model.codec = data.codec();
  model.mode = cfg.mode;
  model.metric = metric;
  model.seed = seed;

  std::vector<Word> centroids = InitCentroids(data, k, seed);

  // Movement threshold in the metric's real units (squared for L2).
  double threshold = 0.0;
  if (cfg.epsilon > 0.0 && k > 1) {
    double sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        sep = std::min(sep, DecodeDistance(Distance(CentroidRow(centroids, a, d),
                                                    CentroidRow(centroids, b, d),
                                                    metric),
                                           data.codec(), metric));
      }
    }
    threshold = metric == Metric::kSquaredEuclidean
                    ? cfg.epsilon * cfg.epsilon * sep
                    : cfg.epsilon * sep;
  }

  std::optional<MedianEngine> engine;
  if (cfg.mode == CentroidMode::kMedian) engine.emplace(data, cfg.engine, cfg.tiles);

  std::vector<std::uint32_t> previous;
  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    std::vector<std::uint32_t> labels = Assign(data, centroids, metric);

    IterationRecord rec;
    rec.objective_words = ObjectiveWords(data, labels, centroids, metric);
    rec.objective = DecodeDistance(rec.objective_words, data.codec(), metric);
    if (previous.empty()) {
      rec.moved = n;
    } else {
      for (std::size_t i = 0; i < n; ++i) rec.moved += labels[i] != previous[i];
    }

    std::vector<Word> next =
        engine ? engine->Recompute(labels, k, centroids)
               : RecomputeMean(data, labels, k, centroids);
    ReseedEmptyClusters(data, labels, centroids, k, metric, next);

    model.trace.push_back(rec);
    model.iterations_run = it;
    const bool done =
        CentroidsConverged(centroids, next, k, d, metric, threshold, data.codec());
    centroids = std::move(next);
    previous = std::move(labels);
    if (done) {
      model.converged = true;
      break;
    }
  }

  model.labels = Assign(data, centroids, metric);
  model.centroids = std::move(centroids);
  if (engine && ledger != nullptr && cfg.engine == EngineKind::kSimulated) {
    *ledger += engine->ledger();
  }
  return model;
}

}  // namespace

std::string_view ToString(CentroidMode mode) {
  return mode == CentroidMode::kMean ? "mean" : "median";
}

std::string_view ToString(Metric metric) {
  return metric == Metric::kSquaredEuclidean ? "sqeuclidean" : "manhattan";
}

std::string_view ToString(EngineKind engine) {
  return engine == EngineKind::kReference ? "ref" : "sim";
}

CentroidMode ParseCentroidMode(std::string_view s) {
  if (s == "mean") return CentroidMode::kMean;
  if (s == "median") return CentroidMode::kMedian;
  throw RangeError("unknown centroid mode '" + std::string(s) + "'");
}

Metric ParseMetric(std::string_view s) {
  if (s == "sqeuclidean" || s == "l2") return Metric::kSquaredEuclidean;
  if (s == "manhattan" || s == "l1") return Metric::kManhattan;
  throw RangeError("unknown metric '" + std::string(s) + "'");
}

EngineKind ParseEngine(std::string_view s) {
  if (s == "ref" || s == "reference") return EngineKind::kReference;
  if (s == "sim" || s == "simulated") return EngineKind::kSimulated;
  throw RangeError("unknown engine '" + std::string(s) + "'");
}

SweepQuality ParseSweepQuality(std::string_view s) {
  if (s == "silhouette") return SweepQuality::kSilhouette;
  if (s == "objective") return SweepQuality::kObjective;
  throw RangeError("unknown sweep quality '" + std::string(s) + "'");
}

Metric PairedMetric(CentroidMode mode) {
  return mode == CentroidMode::kMean ? Metric::kSquaredEuclidean
                                     : Metric::kManhattan;
}

void ClusterConfig::Validate(std::size_t n) const {
  if (k < 1 || k > n) {
    throw KError("k must be in [1, " + std::to_string(n) + "], got " +
                 std::to_string(k));
  }
  if (max_iters < 1) throw RangeError("max_iters must be >= 1");
  if (!(epsilon >= 0.0)) throw RangeError("epsilon must be >= 0");
  if (restarts < 1) throw RangeError("restarts must be >= 1");
  if (engine == EngineKind::kSimulated) tiles.Validate();
}

WideUint Distance(std::span<const Word> a, std::span<const Word> b,
                  Metric metric) {
  return RawDistance(a, b, metric).ToWide();
}

double DecodeDistance(const WideUint& words, const FixedPointCodec& codec,
                      Metric metric) {
  const int scale = metric == Metric::kSquaredEuclidean ? 2 * codec.frac_bits()
                                                        : codec.frac_bits();
  return std::ldexp(words.convert_to<double>(), -scale);
}

std::vector<std::size_t> InitIndices(std::size_t n, std::size_t k,
                                     std::uint64_t seed) {
  if (k < 1 || k > n) {
    throw KError("k must be in [1, " + std::to_string(n) + "], got " +
                 std::to_string(k));
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(idx[i], idx[i + UniformBelow(rng, n - i)]);
  }
  idx.resize(k);
  return idx;
}

std::vector<Word> InitCentroids(const EncodedMatrix& data, std::size_t k,
                                std::uint64_t seed) {
  std::vector<Word> out;
  out.reserve(k * data.cols());
  for (std::size_t i : InitIndices(data.rows(), k, seed)) {
    auto r = data.row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return out;
}

std::vector<std::uint32_t> Assign(const EncodedMatrix& data,
                                  std::span<const Word> centroids,
                                  Metric metric) {
  const std::size_t d = data.cols();
  const std::size_t k = centroids.size() / d;
  if (k == 0) throw KError("no centroids to assign to");
  std::vector<std::uint32_t> labels(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto x = data.row(i);
    std::uint32_t best = 0;
    DistanceSum best_d = RawDistance(x, CentroidRow(centroids, 0, d), metric);
    for (std::size_t c = 1; c < k; ++c) {
      const DistanceSum dc = RawDistance(x, CentroidRow(centroids, c, d), metric);
      if (dc < best_d) {
        best_d = dc;
        best = static_cast<std::uint32_t>(c);
      }
    }
    labels[i] = best;
  }
  return labels;
}

std::vector<Word> RecomputeMean(const EncodedMatrix& data,
                                std::span<const std::uint32_t> labels,
                                std::size_t k, std::span<const Word> previous) {
  const std::size_t d = data.cols();
  std::vector<u128> sums(k * d, 0);
  std::vector<std::uint64_t> counts(k, 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const std::uint32_t c = labels[i];
    ++counts[c];
    auto x = data.row(i);
    for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += x[j];
  }
  std::vector<Word> out(previous.begin(), previous.end());
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      out[c * d + j] = RoundedMean(sums[c * d + j], counts[c]);
    }
  }
  return out;
}

MedianEngine::MedianEngine(const EncodedMatrix& data, EngineKind kind,
                           TileConfig tiles)
    : kind_(kind), rows_(data.rows()) {
  const int width = data.codec().width();
  planes_.reserve(data.cols());
  for (std::size_t j = 0; j < data.cols(); ++j) {
    planes_.push_back(BitPlaneMatrix::Build(data.column(j), width));
    if (kind_ == EngineKind::kSimulated) {
      accelerators_.emplace_back(planes_.back(), tiles);
    }
  }
}

std::vector<Word> MedianEngine::Recompute(std::span<const std::uint32_t> labels,
                                          std::size_t k,
                                          std::span<const Word> previous) {
  const std::size_t d = planes_.size();
  if (labels.size() != rows_) throw MaskError("label count does not match data rows");
  std::vector<Word> out(previous.begin(), previous.end());
  for (std::size_t c = 0; c < k; ++c) {
    const RowMask mask = RowMask::FromLabels(labels, static_cast<std::uint32_t>(c));
    if (mask.empty()) continue;
    for (std::size_t j = 0; j < d; ++j) {
      out[c * d + j] = kind_ == EngineKind::kSimulated
                           ? accelerators_[j].Median(mask, ledger_)
                           : Median(planes_[j], mask);
    }
  }
  return out;
}

std::size_t ReseedEmptyClusters(const EncodedMatrix& data,
                                std::span<const std::uint32_t> labels,
                                std::span<const Word> assigned_centroids,
                                std::size_t k, Metric metric,
                                std::vector<Word>& centroids) {
  const std::size_t d = data.cols();
  std::vector<std::uint64_t> counts(k, 0);
  for (std::uint32_t l : labels) ++counts[l];
  std::vector<bool> taken(data.rows(), false);
  std::size_t reseeded = 0;
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::optional<std::size_t> far;
    DistanceSum far_d;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      if (taken[i]) continue;
      const DistanceSum di = RawDistance(
          data.row(i), CentroidRow(assigned_centroids, labels[i], d), metric);
      if (!far || far_d < di) {
        far = i;
        far_d = di;
      }
    }
    if (!far) break;
    taken[*far] = true;
    auto x = data.row(*far);
    std::copy(x.begin(), x.end(), centroids.begin() + c * d);
    ++reseeded;
  }
  return reseeded;
}

WideUint ObjectiveWords(const EncodedMatrix& data,
                        std::span<const std::uint32_t> labels,
                        std::span<const Word> centroids, Metric metric) {
  const std::size_t d = data.cols();
  WideUint total = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    total += RawDistance(data.row(i), CentroidRow(centroids, labels[i], d), metric)
                 .ToWide();
  }
  return total;
}

double Objective(const EncodedMatrix& data, const ClusterModel& model,
                 Metric metric) {
  return DecodeDistance(ObjectiveWords(data, model.labels, model.centroids, metric),
                        data.codec(), metric);
}

ClusterModel Run(const EncodedMatrix& data, const ClusterConfig& cfg) {
  cfg.Validate(data.rows());
  CostLedger ledger;
  CostLedger* sink = cfg.engine == EngineKind::kSimulated ? &ledger : nullptr;
  std::optional<ClusterModel> best;
  WideUint best_obj;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    ClusterModel m = RunOnce(data, cfg, cfg.seed + r, sink);
    const WideUint obj = ObjectiveWords(data, m.labels, m.centroids, m.metric);
    if (!best || obj < best_obj) {
      best = std::move(m);
      best_obj = obj;
    }
  }
  if (sink != nullptr && cfg.mode == CentroidMode::kMedian) best->ledger = ledger;
  return std::move(*best);
}

double MeanSilhouette(const EncodedMatrix& data,
                      std::span<const std::uint32_t> labels, std::size_t k,
                      Metric metric) {
  const std::size_t n = data.rows();
  const std::size_t d = data.cols();
  std::vector<double> x(n * d);
  for (std::size_t i = 0; i < n * d; ++i) x[i] = data.codec().Decode(data.words()[i]);
  std::vector<std::size_t> sizes(k, 0);
  for (std::uint32_t l : labels) ++sizes[l];
  if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2) {
    return 0.0;
  }

  std::vector<double> to_cluster(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(to_cluster.begin(), to_cluster.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double acc = 0.0;
      for (std::size_t t = 0; t < d; ++t) {
        const double diff = x[i * d + t] - x[j * d + t];
        acc += metric == Metric::kSquaredEuclidean ? diff * diff : std::fabs(diff);
      }
      to_cluster[labels[j]] +=
          metric == Metric::kSquaredEuclidean ? std::sqrt(acc) : acc;
    }
    const std::uint32_t own = labels[i];
    if (sizes[own] <= 1) continue;
    const double a = to_cluster[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own || sizes[c] == 0) continue;
      b = std::min(b, to_cluster[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

SweepReport SweepK(const EncodedMatrix& data, std::size_t k_min,
                   std::size_t k_max, const ClusterConfig& cfg,
                   SweepQuality quality) {
  if (k_min < 1 || k_min >= k_max || k_max > data.rows()) {
    throw RangeError("sweep bounds must satisfy 1 <= k_min < k_max <= n");
  }
  SweepReport report;
  for (std::size_t k = k_min + 1; k < k_max; ++k) {
    ClusterConfig run_cfg = cfg;
    run_cfg.k = k;
    const ClusterModel model = Run(data, run_cfg);
    SweepRow row;
    row.k = k;
    row.objective = Objective(data, model, model.metric);
    row.iterations = model.iterations_run;
    if (quality == SweepQuality::kSilhouette) {
      row.silhouette = MeanSilhouette(data, model.labels, k, model.metric);
      if (!report.k_opt) {
        report.k_opt = k;
      } else {
        const auto& best = std::find_if(report.rows.begin(), report.rows.end(),
                                        [&](const SweepRow& r) { return r.k == *report.k_opt; });
        if (*row.silhouette > *best->silhouette) report.k_opt = k;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace medsel
