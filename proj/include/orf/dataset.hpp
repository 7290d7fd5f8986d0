#pragma once

// In-memory point sets: loading from text files and synthetic generators.

#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "orf/csv.hpp"
#include "orf/errors.hpp"
#include "orf/rng.hpp"
#include "orf/transforms.hpp"

namespace orf {

/// n points, one per row of `points`.
struct Dataset {
  Eigen::MatrixXd points;
  std::string source;
  Index d_original = 0;

  Index size() const noexcept { return points.rows(); }
  Index dim() const noexcept { return points.cols(); }
};

enum class DataFormat { DenseCsv, Whitespace };

inline DataFormat parse_format(std::string_view s) {
  if (s == "dense-csv" || s == "csv") return DataFormat::DenseCsv;
  if (s == "whitespace" || s == "ws") return DataFormat::Whitespace;
  throw ConfigurationError("unknown data format '" + std::string(s) + "'");
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, DataFormat fmt) {
  std::vector<std::string_view> out;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  if (fmt == DataFormat::DenseCsv) {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      out.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

inline bool parse_number(std::string_view tok, double& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok.empty()) return false;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc{} && res.ptr == tok.data() + tok.size();
}

inline bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace detail

/// Parses one point per line. Blank lines are skipped. A first line made only
/// of non-numeric fields is treated as a header. No normalization is applied.
inline Dataset parse_dataset(std::istream& in, DataFormat fmt, std::string source = "<stream>") {
  std::vector<double> values;
  Index width = -1;
  Index rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    const auto fields = detail::split_fields(line, fmt);
    const bool first = !seen_content;
    seen_content = true;

    std::vector<double> row(fields.size());
    std::size_t bad = 0;
    std::string_view bad_tok;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (!detail::parse_number(fields[i], row[i])) {
        if (bad == 0) bad_tok = fields[i];
        ++bad;
      }
    }
    if (first && bad == fields.size()) continue;  // header
    if (bad != 0) {
      throw ParseError("non-numeric field '" + std::string(bad_tok) + "'", line_no);
    }
    for (double v : row) {
      if (!std::isfinite(v)) throw ParseError("non-finite value", line_no);
    }
    if (width < 0) {
      width = static_cast<Index>(row.size());
    } else if (static_cast<Index>(row.size()) != width) {
      throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(row.size()),
                       line_no);
    }
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ParseError("no data rows in " + source, 0);

  Dataset ds;
  ds.points = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), rows, width);
  ds.source = std::move(source);
  ds.d_original = width;
  return ds;
}

inline Dataset load_dataset(const std::string& path, DataFormat fmt) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return parse_dataset(in, fmt, path);
}

/// Writes a header line x0..x{d-1} followed by one CSV row per point.
inline void write_dataset(std::ostream& os, const Dataset& ds) {
  CsvWriter w(os);
  for (Index j = 0; j < ds.dim(); ++j) w.field("x" + std::to_string(j));
  w.end_row();
  for (Index i = 0; i < ds.size(); ++i) {
    for (Index j = 0; j < ds.dim(); ++j) w.field(ds.points(i, j));
    w.end_row();
  }
}

inline void save_dataset(const std::string& path, const Dataset& ds) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_dataset(out, ds);
}

enum class SynthKind { Gaussian, Sphere };

inline SynthKind parse_synth_kind(std::string_view s) {
  if (s == "gaussian") return SynthKind::Gaussian;
  if (s == "sphere") return SynthKind::Sphere;
  throw ConfigurationError("unknown synthetic dataset kind '" + std::string(s) + "'");
}

/// Row i draws from derive_seed(seed, i).
inline Dataset synth_dataset(SynthKind kind, Index n, Index d, Seed seed) {
  if (n < 1 || d < 1) throw ConfigurationError("synth_dataset: n and d must be positive");
  Dataset ds;
  ds.points.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    for (Index j = 0; j < d; ++j) ds.points(i, j) = rng.normal();
    if (kind == SynthKind::Sphere) ds.points.row(i).normalize();
  }
  ds.source = std::string(kind == SynthKind::Gaussian ? "synth:gaussian" : "synth:sphere") + ":n=" +
              std::to_string(n) + ":d=" + std::to_string(d) + ":seed=" + std::to_string(seed);
  ds.d_original = d;
  return ds;
}

}  // namespace orf
