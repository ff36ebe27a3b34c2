// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "cli.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "export.h"
#include "manifest.h"
#include "medsel/bitplane.h"
#include "medsel/clustering.h"
#include "medsel/errors.h"
#include "medsel/ingest.h"

#ifndef MEDSEL_VERSION
#define MEDSEL_VERSION "0.0.0"
#endif

namespace medsel::tools {

namespace {

struct InputOptions {
  std::string path;
  std::string delimiter = ";";
  std::string header = "detect";
  std::string columns;  // comma list of names or indices, empty = all
  int width = 64;
  std::optional<int> frac_bits;
  std::string manifest_path;
};

struct TileOptions {
  std::string tiles;  // "R,G,F", empty = MEDSEL_TILES or built-in defaults

  TileConfig Resolve() const {
    return tiles.empty() ? TileConfig::FromEnvironment() : TileConfig::Parse(tiles);
  }
};

struct ClusterOptions {
  std::size_t k = 2;
  std::uint64_t seed = 1;
  std::string mode = "mean";
  std::string engine = "ref";
  std::string metric;
  std::size_t max_iters = 100;
  double epsilon = 0.0;
  std::size_t restarts = 1;

  ClusterConfig Resolve(const TileConfig& tiles) const {
    ClusterConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.mode = ParseCentroidMode(mode);
    if (!metric.empty()) cfg.metric = ParseMetric(metric);
    cfg.engine = ParseEngine(engine);
    cfg.max_iters = max_iters;
    cfg.epsilon = epsilon;
    cfg.restarts = restarts;
    cfg.tiles = tiles;
    return cfg;
  }
};

std::string Shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void AddInputOptions(CLI::App* sub, InputOptions& in, bool with_columns) {
  sub->add_option("input", in.path, "Delimited numeric data file")->required();
  sub->add_option("--delimiter", in.delimiter,
                  "Field delimiter: ';', ',' or 'tab'")
      ->capture_default_str();
  sub->add_option("--header", in.header, "present | absent | detect")
      ->capture_default_str();
  if (with_columns) {
    sub->add_option("--columns", in.columns,
                    "Comma-separated column names or indices (default: all)");
  }
  sub->add_option("--width", in.width, "Fixed-point word width in bits")
      ->capture_default_str();
  sub->add_option("--frac-bits", in.frac_bits,
                  "Fraction bits (default: largest that fits the data)");
  sub->add_option("--manifest", in.manifest_path, "Write the run manifest here");
}

Dataset LoadDataset(const InputOptions& in) {
  ParseOptions opts;
  if (in.delimiter == "tab" || in.delimiter == "\\t") {
    opts.delimiter = '\t';
  } else if (in.delimiter.size() == 1) {
    opts.delimiter = in.delimiter[0];
  } else {
    throw RangeError("delimiter must be a single character or 'tab'");
  }
  if (in.header == "present") {
    opts.header = HeaderMode::kPresent;
  } else if (in.header == "absent") {
    opts.header = HeaderMode::kAbsent;
  } else if (in.header == "detect") {
    opts.header = HeaderMode::kDetect;
  } else {
    throw RangeError("--header must be present, absent or detect");
  }
  Dataset ds = ParseFile(in.path, opts);
  if (!in.columns.empty()) {
    std::vector<std::size_t> picked;
    for (const auto& c : SplitList(in.columns)) picked.push_back(ds.ColumnIndex(c));
    ds = ds.SelectColumns(picked);
  }
  return ds;
}

FixedPointCodec ResolveCodec(const Dataset& ds, const InputOptions& in) {
  if (!in.frac_bits) return FitDatasetCodec(ds, in.width);
  const bool negative = std::any_of(ds.values.begin(), ds.values.end(),
                                    [](double v) { return v < 0.0; });
  return negative ? FixedPointCodec::Signed(in.width, *in.frac_bits)
                  : FixedPointCodec::Unsigned(in.width, *in.frac_bits);
}

nlohmann::json CollectFlags(const CLI::App* sub) {
  nlohmann::json flags = nlohmann::json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name();
    if (name == "--help") continue;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < res.size(); ++i) joined += (i ? "," : "") + res[i];
      flags[name] = opt->get_type_size() == 0 ? std::string("true") : joined;
    } else {
      flags[name] = opt->get_default_str();
    }
  }
  return flags;
}

void EmitManifest(const CLI::App* sub, const InputOptions& in,
                  std::uint64_t seed, nlohmann::json resolved,
                  const std::string& default_path, std::ostream& err) {
  RunManifest m;
  m.subcommand = sub->get_name();
  m.flags = CollectFlags(sub);
  m.flags["resolved"] = std::move(resolved);
  m.seed = seed;
  m.input_digest = DigestFile(in.path);
  m.tool_version = MEDSEL_VERSION;
  m.timestamp = UtcTimestamp();
  const std::string path = in.manifest_path.empty() ? default_path : in.manifest_path;
  if (path.empty()) {
    err << "manifest: " << m.ToJson().dump() << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw RangeError("cannot write manifest '" + path + "'");
  f << m.ToJson().dump(2) << '\n';
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream f(path);
  if (!f) throw RangeError("cannot write '" + path + "'");
  f << contents;
}

}  // namespace

std::vector<CostRow> BuildCostReport(const EncodedMatrix& data,
                                     std::span<const std::size_t> sizes,
                                     std::size_t k, std::uint64_t seed,
                                     std::size_t max_iters,
                                     const TileConfig& tiles) {
  std::vector<CostRow> rows;
  for (std::size_t n : sizes) {
    if (n < 1 || n > data.rows()) {
      throw RangeError("subsample size " + std::to_string(n) + " outside [1, " +
                       std::to_string(data.rows()) + "]");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const EncodedMatrix sub = data.SelectRows(idx);
    ClusterConfig cfg;
    cfg.k = k;
    cfg.seed = seed;
    cfg.max_iters = max_iters;
    cfg.mode = CentroidMode::kMedian;
    cfg.engine = EngineKind::kSimulated;
    cfg.tiles = tiles;
    const ClusterModel model = Run(sub, cfg);
    CostRow row;
    row.n = n;
    row.width = data.codec().width();
    row.tiles = (n + tiles.rows_per_array - 1) / tiles.rows_per_array;
    row.ledger = model.ledger.value_or(CostLedger{});
    rows.push_back(row);
  }
  return rows;
}

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bit-serial median selection, in-storage accelerator model and "
               "k-means / k-medians clustering"};
  app.set_version_flag("--version", MEDSEL_VERSION);
  app.require_subcommand(1);

  // median
  InputOptions median_in;
  TileOptions median_tiles;
  std::string median_column;
  std::optional<std::uint64_t> median_rank;
  bool median_simulate = false;
  std::string ledger_format = "json";
  CLI::App* median = app.add_subcommand("median", "Median or r-th smallest of one column");
  AddInputOptions(median, median_in, false);
  median->add_option("--column", median_column, "Column name or index");
  median->add_option("--rank", median_rank, "Rank from the smallest (default: lower median)");
  median->add_flag("--simulate", median_simulate, "Run on the tiled accelerator model");
  median->add_option("--tiles", median_tiles.tiles, "Tile config R,G,F (default 256,16,2 or $MEDSEL_TILES)");
  median->add_option("--ledger-format", ledger_format, "json | csv")->capture_default_str();

  // cluster
  InputOptions cluster_in;
  TileOptions cluster_tiles;
  ClusterOptions cluster_opts;
  std::optional<double> split_percentage;
  bool preserve_order = false;
  std::string out_prefix = "model";
  CLI::App* cluster = app.add_subcommand("cluster", "k-means / k-medians clustering");
  AddInputOptions(cluster, cluster_in, true);
  cluster->add_option("--k", cluster_opts.k, "Cluster count")->required();
  cluster->add_option("--seed", cluster_opts.seed, "Random number seed")->capture_default_str();
  cluster->add_option("--mode", cluster_opts.mode, "mean | median")->capture_default_str();
  cluster->add_option("--engine", cluster_opts.engine, "ref | sim")->capture_default_str();
  cluster->add_option("--metric", cluster_opts.metric, "sqeuclidean | manhattan (default: paired with mode)");
  cluster->add_option("--max-iters", cluster_opts.max_iters, "Iteration cap")->capture_default_str();
  cluster->add_option("--epsilon", cluster_opts.epsilon,
                      "Convergence fraction of the minimum initial centroid separation")
      ->capture_default_str();
  cluster->add_option("--restarts", cluster_opts.restarts, "Seeded restarts; best objective wins")
      ->capture_default_str();
  cluster->add_option("--tiles", cluster_tiles.tiles, "Tile config R,G,F for --engine sim");
  cluster->add_option("--split-percentage", split_percentage,
                      "Fit on this percentage of rows, evaluate on the rest");
  cluster->add_flag("--preserve-order", preserve_order, "Do not shuffle before splitting");
  cluster->add_option("--out", out_prefix, "Output prefix for model, assignments and manifest")
      ->capture_default_str();

  // stats
  InputOptions stats_in;
  std::string stats_format = "text";
  bool t_quantile = false;
  CLI::App* stats = app.add_subcommand("stats", "Descriptive statistics table");
  AddInputOptions(stats, stats_in, true);
  stats->add_option("--format", stats_format, "text | csv")->capture_default_str();
  stats->add_flag("--t-quantile", t_quantile, "Student t confidence half-width instead of 1.96");

  // sweep
  InputOptions sweep_in;
  TileOptions sweep_tiles;
  ClusterOptions sweep_opts;
  std::size_t k_min = 1;
  std::size_t k_max = 2;
  std::string quality = "silhouette";
  std::string sweep_out;
  CLI::App* sweep = app.add_subcommand("sweep", "Run clustering over a range of k");
  AddInputOptions(sweep, sweep_in, true);
  sweep->add_option("--k-min", k_min, "Exclusive lower bound")->required();
  sweep->add_option("--k-max", k_max, "Exclusive upper bound")->required();
  sweep->add_option("--quality", quality, "silhouette | objective")->capture_default_str();
  sweep->add_option("--seed", sweep_opts.seed, "Random number seed")->capture_default_str();
  sweep->add_option("--mode", sweep_opts.mode, "mean | median")->capture_default_str();
  sweep->add_option("--engine", sweep_opts.engine, "ref | sim")->capture_default_str();
  sweep->add_option("--metric", sweep_opts.metric, "sqeuclidean | manhattan");
  sweep->add_option("--max-iters", sweep_opts.max_iters, "Iteration cap")->capture_default_str();
  sweep->add_option("--epsilon", sweep_opts.epsilon, "Convergence fraction")->capture_default_str();
  sweep->add_option("--restarts", sweep_opts.restarts, "Seeded restarts per k")->capture_default_str();
  sweep->add_option("--tiles", sweep_tiles.tiles, "Tile config R,G,F for --engine sim");
  sweep->add_option("--out", sweep_out, "Write the per-k CSV here instead of stdout");

  // cost-report
  InputOptions cost_in;
  TileOptions cost_tiles;
  std::size_t cost_k = 1;
  std::uint64_t cost_seed = 1;
  std::size_t cost_iters = 1;
  std::string subsample;
  std::string cost_format = "csv";
  CLI::App* cost = app.add_subcommand("cost-report", "In-situ vs streaming bit movement");
  AddInputOptions(cost, cost_in, true);
  cost->add_option("--k", cost_k, "Cluster count")->capture_default_str();
  cost->add_option("--seed", cost_seed, "Random number seed")->capture_default_str();
  cost->add_option("--max-iters", cost_iters, "Centroid updates per subsample")->capture_default_str();
  cost->add_option("--subsample", subsample, "Comma-separated row counts N (default: all rows)");
  cost->add_option("--tiles", cost_tiles.tiles, "Tile config R,G,F");
  cost->add_option("--format", cost_format, "csv | json")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (median->parsed()) {
      const Dataset ds = LoadDataset(median_in);
      std::size_t col = 0;
      if (!median_column.empty()) {
        col = ds.ColumnIndex(median_column);
      } else if (ds.cols() != 1) {
        throw RangeError("input has " + std::to_string(ds.cols()) +
                         " columns; choose one with --column");
      }
      const Dataset one = ds.SelectColumns(std::vector<std::size_t>{col});
      const FixedPointCodec codec = ResolveCodec(one, median_in);
      const EncodedMatrix enc = EncodeDataset(one, codec);
      const BitPlaneMatrix m = BitPlaneMatrix::Build(enc.words(), codec.width());
      const RowMask mask = RowMask::All(m.rows());
      const std::uint64_t rank = median_rank.value_or(MedianRank(m.rows()));
      nlohmann::json resolved = {{"codec", CodecToJson(codec)}, {"rank", rank}};
      if (median_simulate) {
        const TileConfig tiles = median_tiles.Resolve();
        const Accelerator acc(m, tiles);
        CostLedger ledger;
        const Word w = acc.RankSelect(mask, rank, ledger);
        out << Shortest(codec.Decode(w)) << '\n';
        CostRow row{m.rows(), m.width(), acc.plan().tiles.size(), ledger};
        if (ledger_format == "csv") {
          out << LedgerCsvHeader() << '\n' << LedgerCsvRow(row) << '\n';
        } else if (ledger_format == "json") {
          nlohmann::json j = LedgerToJson(ledger);
          j["N"] = row.n;
          j["W"] = row.width;
          j["tiles"] = row.tiles;
          j["tile_config"] = TileConfigToJson(tiles);
          out << j.dump() << '\n';
        } else {
          throw RangeError("--ledger-format must be json or csv");
        }
        resolved["tiles"] = TileConfigToJson(tiles);
      } else {
        out << Shortest(codec.Decode(RankSelect(m, mask, rank))) << '\n';
      }
      EmitManifest(median, median_in, 1, resolved, "", err);
      return 0;
    }

    if (cluster->parsed()) {
      const Dataset ds = LoadDataset(cluster_in);
      const FixedPointCodec codec = ResolveCodec(ds, cluster_in);
      const EncodedMatrix enc = EncodeDataset(ds, codec);
      const ClusterConfig cfg = cluster_opts.Resolve(cluster_tiles.Resolve());

      std::vector<std::size_t> order(enc.rows());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<std::size_t> train_idx = order;
      std::vector<std::size_t> hold_idx;
      if (split_percentage) {
        const double p = *split_percentage;
        if (!(p > 0.0 && p < 100.0)) {
          throw RangeError("--split-percentage must be in (0, 100)");
        }
        if (!preserve_order) {
          order = InitIndices(order.size(), order.size(), cfg.seed);
        }
        const auto train_n = static_cast<std::size_t>(
            std::floor(static_cast<double>(enc.rows()) * p / 100.0));
        if (train_n < 1) throw RangeError("split leaves no training rows");
        train_idx.assign(order.begin(), order.begin() + train_n);
        hold_idx.assign(order.begin() + train_n, order.end());
      }
      const EncodedMatrix train = enc.SelectRows(train_idx);
      const ClusterModel model = Run(train, cfg);

      std::optional<HoldoutReport> holdout;
      if (split_percentage) {
        HoldoutReport h;
        h.rows = hold_idx.size();
        if (!hold_idx.empty()) {
          const EncodedMatrix hold = enc.SelectRows(hold_idx);
          const auto labels = Assign(hold, model.centroids, model.metric);
          h.objective = DecodeDistance(
              ObjectiveWords(hold, labels, model.centroids, model.metric),
              codec, model.metric);
        }
        holdout = h;
      }

      WriteFile(out_prefix + ".json",
                ModelToJson(model, ds.column_names, cfg.engine, holdout).dump(2) + "\n");
      std::ostringstream assignments;
      std::vector<std::size_t> all_rows(enc.rows());
      std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
      WriteAssignmentsCsv(enc, all_rows, model, assignments);
      WriteFile(out_prefix + ".assignments.csv", assignments.str());

      nlohmann::json resolved = {{"codec", CodecToJson(codec)},
                                 {"metric", std::string(ToString(model.metric))}};
      if (cfg.engine == EngineKind::kSimulated) resolved["tiles"] = TileConfigToJson(cfg.tiles);
      EmitManifest(cluster, cluster_in, cfg.seed, resolved,
                   out_prefix + ".manifest.json", err);

      out << "k=" << model.k << " iterations=" << model.iterations_run
          << " converged=" << (model.converged ? "true" : "false")
          << " objective=" << Shortest(Objective(train, model, model.metric));
      if (holdout) out << " holdout_objective=" << Shortest(holdout->objective);
      out << '\n';
      return 0;
    }

    if (stats->parsed()) {
      const Dataset ds = LoadDataset(stats_in);
      StatsOptions opts;
      opts.t_quantile = t_quantile;
      const auto rows = SummaryStats(ds, opts);
      if (stats_format == "csv") {
        WriteStatsCsv(rows, out);
      } else if (stats_format == "text") {
        WriteStatsText(rows, out);
      } else {
        throw RangeError("--format must be text or csv");
      }
      EmitManifest(stats, stats_in, 1, nlohmann::json::object(), "", err);
      return 0;
    }

    if (sweep->parsed()) {
      const Dataset ds = LoadDataset(sweep_in);
      const FixedPointCodec codec = ResolveCodec(ds, sweep_in);
      const EncodedMatrix enc = EncodeDataset(ds, codec);
      const ClusterConfig cfg = sweep_opts.Resolve(sweep_tiles.Resolve());
      const SweepReport report = SweepK(enc, k_min, k_max, cfg, ParseSweepQuality(quality));
      std::ostringstream csv;
      WriteSweepCsv(report, csv);
      const std::string k_opt =
          report.k_opt ? std::to_string(*report.k_opt) : std::string("none");
      if (sweep_out.empty()) {
        out << "# k_opt: " << k_opt << '\n' << csv.str();
      } else {
        WriteFile(sweep_out, csv.str());
        out << "k_opt: " << k_opt << '\n';
      }
      EmitManifest(sweep, sweep_in, cfg.seed, {{"codec", CodecToJson(codec)}}, "", err);
      return 0;
    }

    if (cost->parsed()) {
      const Dataset ds = LoadDataset(cost_in);
      const FixedPointCodec codec = ResolveCodec(ds, cost_in);
      const EncodedMatrix enc = EncodeDataset(ds, codec);
      const TileConfig tiles = cost_tiles.Resolve();
      std::vector<std::size_t> sizes;
      for (const auto& s : SplitList(subsample)) {
        std::size_t v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
          throw RangeError("bad --subsample entry '" + s + "'");
        }
        sizes.push_back(v);
      }
      if (sizes.empty()) sizes.push_back(enc.rows());
      const auto rows = BuildCostReport(enc, sizes, cost_k, cost_seed, cost_iters, tiles);
      const std::string formulas = CostModelFormulas(tiles);
      if (cost_format == "json") {
        nlohmann::json j;
        j["tile_config"] = TileConfigToJson(tiles);
        j["formulas"] = nlohmann::json::array();
        std::istringstream lines(formulas);
        for (std::string line; std::getline(lines, line);) j["formulas"].push_back(line);
        j["rows"] = nlohmann::json::array();
        for (const auto& r : rows) {
          nlohmann::json jr = LedgerToJson(r.ledger);
          jr["N"] = r.n;
          jr["W"] = r.width;
          jr["tiles"] = r.tiles;
          j["rows"].push_back(std::move(jr));
        }
        out << j.dump(2) << '\n';
      } else if (cost_format == "csv") {
        std::istringstream lines(formulas);
        for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
        out << CostReportCsvHeader() << '\n';
        for (const auto& r : rows) out << CostReportCsvRow(r) << '\n';
      } else {
        throw RangeError("--format must be csv or json");
      }
      EmitManifest(cost, cost_in, cost_seed, {{"codec", CodecToJson(codec)},
                                              {"tiles", TileConfigToJson(tiles)}},
                   "", err);
      return 0;
    }
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace medsel::tools
