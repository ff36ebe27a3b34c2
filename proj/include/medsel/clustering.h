// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Lloyd-style k-means and k-medians over fixed-point words.
//
// Distances are exact integer arithmetic on the encoded words. Mean centroids
// are rounded back onto the fixed-point grid (half to even); median centroids
// are per-dimension lower medians computed by the bit-serial selector, either
// the reference engine or the tiled accelerator model. Ties resolve toward
// the lowest index everywhere, so a run is fully determined by its inputs.
#ifndef MEDSEL_CLUSTERING_H_
#define MEDSEL_CLUSTERING_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "medsel/fixedpoint.h"
#include "medsel/pimsim.h"

namespace medsel {

// Exact accumulator for distances and objectives in word units.
using WideUint = boost::multiprecision::uint256_t;

enum class CentroidMode { kMean, kMedian };
enum class Metric { kSquaredEuclidean, kManhattan };
enum class EngineKind { kReference, kSimulated };
enum class SweepQuality { kSilhouette, kObjective };

std::string_view ToString(CentroidMode mode);
std::string_view ToString(Metric metric);
std::string_view ToString(EngineKind engine);
CentroidMode ParseCentroidMode(std::string_view s);
Metric ParseMetric(std::string_view s);
EngineKind ParseEngine(std::string_view s);
SweepQuality ParseSweepQuality(std::string_view s);

// Mean pairs with squared Euclidean, median with Manhattan.
Metric PairedMetric(CentroidMode mode);

struct ClusterConfig {
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::size_t max_iters = 100;
  CentroidMode mode = CentroidMode::kMean;
  std::optional<Metric> metric;  // unset: PairedMetric(mode)
  // Converged when every centroid moves less than epsilon times the minimum
  // separation of the initial centroids; 0 means exact equality.
  double epsilon = 0.0;
  EngineKind engine = EngineKind::kReference;
  TileConfig tiles;
  // Independent seeded initializations; the lowest final objective wins.
  std::size_t restarts = 1;

  Metric resolved_metric() const { return metric.value_or(PairedMetric(mode)); }
  // Throws KError / RangeError.
  void Validate(std::size_t n) const;
};

struct IterationRecord {
  WideUint objective_words;  // exact, in word units (squared for L2)
  double objective = 0.0;    // decoded to real units
  std::size_t moved = 0;     // points whose label changed this iteration
  bool operator==(const IterationRecord&) const = default;
};

struct ClusterModel {
  std::size_t k = 0;
  std::size_t dims = 0;
  FixedPointCodec codec{64, 0};
  CentroidMode mode = CentroidMode::kMean;
  Metric metric = Metric::kSquaredEuclidean;
  std::vector<Word> centroids;        // k x dims, row-major
  std::vector<std::uint32_t> labels;  // one per point
  std::size_t iterations_run = 0;
  bool converged = false;
  std::uint64_t seed = 0;             // seed of the winning restart
  std::vector<IterationRecord> trace;
  std::optional<CostLedger> ledger;   // set for the simulated engine

  std::span<const Word> centroid(std::size_t c) const {
    return {centroids.data() + c * dims, dims};
  }
};

// Exact distance between two word vectors of equal length.
WideUint Distance(std::span<const Word> a, std::span<const Word> b, Metric metric);
// Word-unit value to real units under `codec` for the given metric.
double DecodeDistance(const WideUint& words, const FixedPointCodec& codec,
                      Metric metric);

// k distinct rows drawn by a seeded Fisher-Yates prefix (mt19937_64 with
// rejection-sampled bounds, identical across platforms). Throws KError.
std::vector<std::size_t> InitIndices(std::size_t n, std::size_t k,
                                     std::uint64_t seed);
std::vector<Word> InitCentroids(const EncodedMatrix& data, std::size_t k,
                                std::uint64_t seed);

// Nearest centroid per point, lowest index on ties.
std::vector<std::uint32_t> Assign(const EncodedMatrix& data,
                                  std::span<const Word> centroids,
                                  Metric metric);

// Per-cluster mean rounded half-to-even onto the grid. Clusters with no
// members keep their previous centroid (`previous`, k x d).
std::vector<Word> RecomputeMean(const EncodedMatrix& data,
                                std::span<const std::uint32_t> labels,
                                std::size_t k, std::span<const Word> previous);

// Per-dimension bit-serial lower medians, one selection per (cluster, dim).
class MedianEngine {
 public:
  MedianEngine(const EncodedMatrix& data, EngineKind kind, TileConfig tiles = {});

  EngineKind kind() const { return kind_; }
  const CostLedger& ledger() const { return ledger_; }

  // Same empty-cluster rule as RecomputeMean.
  std::vector<Word> Recompute(std::span<const std::uint32_t> labels,
                              std::size_t k, std::span<const Word> previous);

 private:
  EngineKind kind_;
  std::size_t rows_;
  std::vector<BitPlaneMatrix> planes_;
  std::vector<Accelerator> accelerators_;
  CostLedger ledger_;
};

// Moves each empty cluster's centroid onto the point farthest from its own
// assigned centroid (lowest index on ties), distinct per empty cluster.
// Returns the number of clusters reseeded.
std::size_t ReseedEmptyClusters(const EncodedMatrix& data,
                                std::span<const std::uint32_t> labels,
                                std::span<const Word> assigned_centroids,
                                std::size_t k, Metric metric,
                                std::vector<Word>& centroids);

WideUint ObjectiveWords(const EncodedMatrix& data,
                        std::span<const std::uint32_t> labels,
                        std::span<const Word> centroids, Metric metric);
// Sum of point-to-centroid distances in real units.
double Objective(const EncodedMatrix& data, const ClusterModel& model,
                 Metric metric);

ClusterModel Run(const EncodedMatrix& data, const ClusterConfig& cfg);

// Mean silhouette with Euclidean (L2 metrics) or L1 distances on decoded
// values. Singleton clusters score 0. Needs at least two clusters.
double MeanSilhouette(const EncodedMatrix& data,
                      std::span<const std::uint32_t> labels, std::size_t k,
                      Metric metric);

struct SweepRow {
  std::size_t k = 0;
  double objective = 0.0;
  std::optional<double> silhouette;
  std::size_t iterations = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::optional<std::size_t> k_opt;  // only for kSilhouette
};

// Runs every k with k_min < k < k_max. Throws RangeError on bad bounds.
SweepReport SweepK(const EncodedMatrix& data, std::size_t k_min,
                   std::size_t k_max, const ClusterConfig& cfg,
                   SweepQuality quality);

}  // namespace medsel

#endif  // MEDSEL_CLUSTERING_H_
