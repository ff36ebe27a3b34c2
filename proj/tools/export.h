// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// JSON and CSV renderings of models, ledgers and reports.
#ifndef MEDSEL_TOOLS_EXPORT_H_
#define MEDSEL_TOOLS_EXPORT_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medsel/clustering.h"
#include "medsel/fixedpoint.h"
#include "medsel/pimsim.h"

namespace medsel::tools {

nlohmann::json CodecToJson(const FixedPointCodec& codec);
nlohmann::json LedgerToJson(const CostLedger& ledger);
nlohmann::json TileConfigToJson(const TileConfig& cfg);

struct HoldoutReport {
  std::size_t rows = 0;
  double objective = 0.0;
};

// Centroids are decoded to reals; raw words are kept alongside so the file
// pins the exact fixed-point state.
nlohmann::json ModelToJson(const ClusterModel& model,
                           std::span<const std::string> column_names,
                           EngineKind engine,
                           const std::optional<HoldoutReport>& holdout);

// index,label,distance, one line per point. `indices` maps each row of
// `data` back to its position in the input file.
void WriteAssignmentsCsv(const EncodedMatrix& data,
                         std::span<const std::size_t> indices,
                         const ClusterModel& model, std::ostream& out);

void WriteSweepCsv(const SweepReport& report, std::ostream& out);

// N,W,tiles,bits_moved,host_bits_moved,ratio
std::string CostReportCsvHeader();
std::string CostReportCsvRow(const CostRow& row);

}  // namespace medsel::tools

#endif  // MEDSEL_TOOLS_EXPORT_H_
