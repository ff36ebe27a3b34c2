// Copyright 2026 The medsel Authors. All rights reserved.
// Use of this source code is governed by the Apache License 2.0
// that can be found in the LICENSE file.

#include "medsel/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <utility>

#include <boost/math/distributions/students_t.hpp>

#include "medsel/errors.h"

namespace medsel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string_view StripQuotes(std::string_view s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') &&
      s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string_view> Split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(delim, start);
    out.push_back(StripQuotes(Trim(line.substr(start, end - start))));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

bool IsMissing(std::string_view s) {
  return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" ||
         s == "?";
}

bool ParseNumber(std::string_view s, double* out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, *out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string FormatShortest(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string FormatTable(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(rows);
  for (std::size_t i = 0; i < rows; ++i) out[i] = at(i, j);
  return out;
}

std::size_t Dataset::ColumnIndex(const std::string& name_or_index) const {
  for (std::size_t j = 0; j < cols(); ++j) {
    if (column_names[j] == name_or_index) return j;
  }
  std::size_t idx = 0;
  const char* end = name_or_index.data() + name_or_index.size();
  const auto res = std::from_chars(name_or_index.data(), end, idx);
  if (!name_or_index.empty() && res.ec == std::errc() && res.ptr == end &&
      idx < cols()) {
    return idx;
  }
  throw RangeError("no column named '" + name_or_index + "'");
}

Dataset Dataset::SelectColumns(std::span<const std::size_t> picked) const {
  Dataset out;
  out.rows = rows;
  out.source = source;
  for (std::size_t j : picked) {
    if (j >= cols()) throw RangeError("column index out of range");
    out.column_names.push_back(column_names[j]);
  }
  out.values.reserve(rows * picked.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j : picked) out.values.push_back(at(i, j));
  }
  return out;
}

Dataset Dataset::SelectRows(std::span<const std::size_t> picked) const {
  Dataset out;
  out.column_names = column_names;
  out.source = source;
  out.rows = picked.size();
  out.values.reserve(picked.size() * cols());
  for (std::size_t i : picked) {
    if (i >= rows) throw RangeError("row index out of range");
    for (std::size_t j = 0; j < cols(); ++j) out.values.push_back(at(i, j));
  }
  return out;
}

Dataset Parse(std::istream& in, const ParseOptions& opts, std::string source) {
  Dataset ds;
  ds.source = std::move(source);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;

  auto add_row = [&](const std::vector<std::string_view>& fields) {
    if (fields.size() != ds.cols()) {
      throw ShapeError("line " + std::to_string(line_no) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(ds.cols()));
    }
    for (std::size_t j = 0; j < fields.size(); ++j) {
      double v = kNaN;
      if (!IsMissing(fields[j]) && !ParseNumber(fields[j], &v)) {
        throw ParseError("line " + std::to_string(line_no) + ", field " +
                             std::to_string(j + 1) + ": '" +
                             std::string(fields[j]) + "' is not a number",
                         line_no, j + 1);
      }
      ds.values.push_back(v);
    }
    ++ds.rows;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto fields = Split(line, opts.delimiter);
    if (!have_header) {
      have_header = true;
      bool numeric = opts.header == HeaderMode::kAbsent;
      if (opts.header == HeaderMode::kDetect) {
        numeric = std::all_of(fields.begin(), fields.end(), [](std::string_view f) {
          double unused;
          return ParseNumber(f, &unused);
        });
      }
      if (numeric) {
        for (std::size_t j = 0; j < fields.size(); ++j) {
          ds.column_names.push_back("col" + std::to_string(j + 1));
        }
        add_row(fields);
      } else {
        for (auto f : fields) ds.column_names.emplace_back(f);
      }
      continue;
    }
    add_row(fields);
  }
  if (!have_header) throw ParseError("input is empty", 0, 0);
  if (ds.rows == 0) throw ParseError("input has a header but no data rows", line_no, 0);
  return ds;
}

Dataset ParseFile(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0, 0);
  return Parse(in, opts, path);
}

void Serialize(const Dataset& ds, std::ostream& out, char delimiter) {
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    if (j) out << delimiter;
    out << '"' << ds.column_names[j] << '"';
  }
  out << '\n';
  for (std::size_t i = 0; i < ds.rows; ++i) {
    for (std::size_t j = 0; j < ds.cols(); ++j) {
      if (j) out << delimiter;
      out << FormatShortest(ds.at(i, j));
    }
    out << '\n';
  }
}

EncodedMatrix EncodeDataset(const Dataset& ds, const FixedPointCodec& codec) {
  return EncodeMatrix(ds.values, ds.rows, ds.cols(), codec);
}

FixedPointCodec FitDatasetCodec(const Dataset& ds, int width) {
  std::vector<double> present;
  present.reserve(ds.values.size());
  for (double v : ds.values) {
    if (!std::isnan(v)) present.push_back(v);
  }
  return FitCodec(present, width);
}

std::vector<StatsRow> SummaryStats(const Dataset& ds, const StatsOptions& opts) {
  std::vector<StatsRow> out;
  out.reserve(ds.cols());
  for (std::size_t j = 0; j < ds.cols(); ++j) {
    StatsRow s;
    s.name = ds.column_names[j];
    std::vector<double> v;
    v.reserve(ds.rows);
    for (std::size_t i = 0; i < ds.rows; ++i) {
      const double x = ds.at(i, j);
      if (std::isnan(x)) {
        s.nbr_na += 1;
      } else {
        v.push_back(x);
        if (x == 0.0) s.nbr_null += 1;
      }
    }
    const std::size_t n = v.size();
    s.nbr_val = static_cast<double>(n);
    if (n == 0) {
      s.min = s.max = s.range = s.sum = s.median = s.mean = kNaN;
      s.se_mean = s.ci_mean_95 = s.var = s.std_dev = s.coef_var = kNaN;
      out.push_back(s);
      continue;
    }
    std::sort(v.begin(), v.end());
    s.min = v.front();
    s.max = v.back();
    s.range = s.max - s.min;
    long double sum = 0;
    for (double x : v) sum += x;
    s.sum = static_cast<double>(sum);
    s.median = n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
    const long double mean = sum / static_cast<long double>(n);
    s.mean = static_cast<double>(mean);
    if (n < 2) {
      s.var = s.std_dev = s.se_mean = s.ci_mean_95 = s.coef_var = kNaN;
      out.push_back(s);
      continue;
    }
    long double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    s.var = static_cast<double>(ss / static_cast<long double>(n - 1));
    s.std_dev = std::sqrt(s.var);
    s.se_mean = s.std_dev / std::sqrt(static_cast<double>(n));
    double q = 1.96;
    if (opts.t_quantile) {
      boost::math::students_t dist(static_cast<double>(n - 1));
      q = boost::math::quantile(boost::math::complement(dist, 0.025));
    }
    s.ci_mean_95 = q * s.se_mean;
    s.coef_var = s.mean != 0.0 ? s.std_dev / s.mean : kNaN;
    out.push_back(s);
  }
  return out;
}

const std::vector<std::string>& StatsRowLabels() {
  static const std::vector<std::string> labels = {
      "nbr.val", "nbr.null", "nbr.na", "min",     "max",
      "range",   "sum",      "median", "mean",    "SE.mean",
      "CI.mean.0.95", "var", "std.dev", "coef.var"};
  return labels;
}

namespace {

std::vector<double> Values(const StatsRow& s) {
  return {s.nbr_val, s.nbr_null, s.nbr_na, s.min,     s.max,
          s.range,   s.sum,      s.median, s.mean,    s.se_mean,
          s.ci_mean_95, s.var,   s.std_dev, s.coef_var};
}

}  // namespace

void WriteStatsText(std::span<const StatsRow> stats, std::ostream& out) {
  const auto& labels = StatsRowLabels();
  std::size_t label_w = 0;
  for (const auto& l : labels) label_w = std::max(label_w, l.size());
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> widths;
  for (const auto& s : stats) {
    std::vector<std::string> col;
    std::size_t w = s.name.size();
    for (double v : Values(s)) {
      col.push_back(FormatTable(v));
      w = std::max(w, col.back().size());
    }
    cells.push_back(std::move(col));
    widths.push_back(w);
  }
  auto pad = [&](const std::string& s, std::size_t w) {
    out << std::string(w > s.size() ? w - s.size() : 0, ' ') << s;
  };
  out << std::string(label_w, ' ');
  for (std::size_t c = 0; c < stats.size(); ++c) {
    out << "  ";
    pad(stats[c].name, widths[c]);
  }
  out << '\n';
  for (std::size_t r = 0; r < labels.size(); ++r) {
    out << labels[r] << std::string(label_w - labels[r].size(), ' ');
    for (std::size_t c = 0; c < stats.size(); ++c) {
      out << "  ";
      pad(cells[c][r], widths[c]);
    }
    out << '\n';
  }
}

void WriteStatsCsv(std::span<const StatsRow> stats, std::ostream& out) {
  out << "stat";
  for (const auto& s : stats) out << ',' << s.name;
  out << '\n';
  const auto& labels = StatsRowLabels();
  std::vector<std::vector<double>> vals;
  for (const auto& s : stats) vals.push_back(Values(s));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    out << labels[r];
    for (const auto& v : vals) out << ',' << FormatShortest(v[r]);
    out << '\n';
  }
}

}  // namespace medsel
