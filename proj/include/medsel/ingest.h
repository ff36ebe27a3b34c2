// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

// Delimited numeric datasets (UCI wine-quality layout by default) and the
// descriptive-statistics table computed over them.
#ifndef MEDSEL_INGEST_H_
#define MEDSEL_INGEST_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "medsel/fixedpoint.h"

namespace medsel {

enum class HeaderMode { kPresent, kAbsent, kDetect };

struct ParseOptions {
  char delimiter = ';';
  HeaderMode header = HeaderMode::kPresent;
};

// Missing cells (empty, "NA", "nan") are stored as NaN.
struct Dataset {
  std::vector<std::string> column_names;
  std::size_t rows = 0;
  std::vector<double> values;  // row-major rows x cols
  std::string source;

  std::size_t cols() const { return column_names.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  std::vector<double> column(std::size_t j) const;
  // Index of a column by exact name or decimal position. Throws RangeError.
  std::size_t ColumnIndex(const std::string& name_or_index) const;
  // Copy restricted to the given columns, in the given order.
  Dataset SelectColumns(std::span<const std::size_t> cols) const;
  Dataset SelectRows(std::span<const std::size_t> rows) const;
};

// Throws ParseError (with 1-based line/field) on malformed numbers or empty
// input, ShapeError on ragged rows.
Dataset Parse(std::istream& in, const ParseOptions& opts = {},
              std::string source = "<stream>");
Dataset ParseFile(const std::string& path, const ParseOptions& opts = {});

// Writes header plus rows using shortest round-trip formatting; missing cells
// are written as NA.
void Serialize(const Dataset& ds, std::ostream& out, char delimiter = ';');

// Every cell must be present and in range. Throws MissingError / RangeError
// naming the offending cell.
EncodedMatrix EncodeDataset(const Dataset& ds, const FixedPointCodec& codec);

// W-bit codec fitted to every cell of the dataset (missing cells ignored).
FixedPointCodec FitDatasetCodec(const Dataset& ds, int width = 64);

struct StatsOptions {
  // Use the Student t quantile with n - 1 degrees of freedom instead of the
  // normal 1.96 for the confidence half-width.
  bool t_quantile = false;
};

struct StatsRow {
  std::string name;
  double nbr_val = 0;
  double nbr_null = 0;
  double nbr_na = 0;
  double min = 0;
  double max = 0;
  double range = 0;
  double sum = 0;
  double median = 0;  // mid-average for even counts
  double mean = 0;
  double se_mean = 0;
  double ci_mean_95 = 0;
  double var = 0;  // n - 1 denominator
  double std_dev = 0;
  double coef_var = 0;
};

std::vector<StatsRow> SummaryStats(const Dataset& ds, const StatsOptions& opts = {});

// Row labels in table order: nbr.val ... coef.var.
const std::vector<std::string>& StatsRowLabels();

// One column per dataset column, one line per statistic.
void WriteStatsText(std::span<const StatsRow> stats, std::ostream& out);
void WriteStatsCsv(std::span<const StatsRow> stats, std::ostream& out);

}  // namespace medsel

#endif  // MEDSEL_INGEST_H_
