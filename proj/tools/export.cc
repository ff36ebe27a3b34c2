// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "export.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace medsel::tools {

namespace {

std::string Shortest(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string Ratio(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

nlohmann::json CodecToJson(const FixedPointCodec& codec) {
  return {{"width", codec.width()},
          {"frac_bits", codec.frac_bits()},
          {"bias", codec.bias()}};
}

nlohmann::json LedgerToJson(const CostLedger& ledger) {
  nlohmann::json j = {{"selections", ledger.selections},
                      {"column_activations", ledger.column_activations},
                      {"counting_steps", ledger.counting_steps},
                      {"merge_ops", ledger.merge_ops},
                      {"bits_moved", ledger.bits_moved},
                      {"host_bits_moved", ledger.host_bits_moved}};
  const double r = ledger.ratio();
  j["ratio"] = std::isnan(r) ? nlohmann::json(nullptr) : nlohmann::json(r);
  return j;
}

nlohmann::json TileConfigToJson(const TileConfig& cfg) {
  return {{"rows_per_array", cfg.rows_per_array},
          {"group_size", cfg.group_size},
          {"tree_fanin", cfg.tree_fanin}};
}

nlohmann::json ModelToJson(const ClusterModel& model,
                           std::span<const std::string> column_names,
                           EngineKind engine,
                           const std::optional<HoldoutReport>& holdout) {
  nlohmann::json j;
  j["k"] = model.k;
  j["dims"] = model.dims;
  j["columns"] = std::vector<std::string>(column_names.begin(), column_names.end());
  j["mode"] = std::string(ToString(model.mode));
  j["metric"] = std::string(ToString(model.metric));
  j["engine"] = std::string(ToString(engine));
  j["seed"] = model.seed;
  j["codec"] = CodecToJson(model.codec);
  j["iterations_run"] = model.iterations_run;
  j["converged"] = model.converged;

  nlohmann::json centroids = nlohmann::json::array();
  nlohmann::json words = nlohmann::json::array();
  for (std::size_t c = 0; c < model.k; ++c) {
    nlohmann::json row = nlohmann::json::array();
    nlohmann::json wrow = nlohmann::json::array();
    for (Word w : model.centroid(c)) {
      row.push_back(model.codec.Decode(w));
      wrow.push_back(w);
    }
    centroids.push_back(std::move(row));
    words.push_back(std::move(wrow));
  }
  j["centroids"] = std::move(centroids);
  j["centroid_words"] = std::move(words);
  j["assignments"] = model.labels;

  nlohmann::json trace = nlohmann::json::array();
  for (std::size_t i = 0; i < model.trace.size(); ++i) {
    trace.push_back({{"iteration", i + 1},
                     {"objective", model.trace[i].objective},
                     {"moved", model.trace[i].moved}});
  }
  j["trace"] = std::move(trace);
  j["objective"] = model.trace.empty() ? 0.0 : model.trace.back().objective;
  j["ledger"] = model.ledger ? LedgerToJson(*model.ledger) : nlohmann::json(nullptr);
  if (holdout) {
    j["holdout"] = {{"rows", holdout->rows}, {"objective", holdout->objective}};
  }
  return j;
}

void WriteAssignmentsCsv(const EncodedMatrix& data,
                         std::span<const std::size_t> indices,
                         const ClusterModel& model, std::ostream& out) {
  out << "index,label,distance\n";
  const auto labels = Assign(data, model.centroids, model.metric);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double dist = DecodeDistance(
        Distance(data.row(i), model.centroid(labels[i]), model.metric),
        data.codec(), model.metric);
    out << indices[i] << ',' << labels[i] << ',' << Shortest(dist) << '\n';
  }
}

void WriteSweepCsv(const SweepReport& report, std::ostream& out) {
  out << "k,objective,silhouette,iterations\n";
  for (const auto& r : report.rows) {
    out << r.k << ',' << Shortest(r.objective) << ','
        << (r.silhouette ? Shortest(*r.silhouette) : std::string("NA")) << ','
        << r.iterations << '\n';
  }
}

std::string CostReportCsvHeader() {
  return "N,W,tiles,bits_moved,host_bits_moved,ratio";
}

std::string CostReportCsvRow(const CostRow& row) {
  std::ostringstream out;
  out << row.n << ',' << row.width << ',' << row.tiles << ','
      << row.ledger.bits_moved << ',' << row.ledger.host_bits_moved << ','
      << Ratio(row.ledger.ratio());
  return out.str();
}

}  // namespace medsel::tools
