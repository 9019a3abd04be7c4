#pragma once

// File formats.
//
//   dense matrix   CSV, one row per line, '.' decimal, no header
//   observations   CSV header "row,col,count", 1-based indices
//   counts         CSV header "hour,day,count", 1-based indices
//   images         PGM, P2 (ASCII) grayscale
//
// Numbers are written in shortest round-trip form so files are
// byte-reproducible and re-read exactly.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "plr/core.hpp"

namespace plr {

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double failed");
  return std::string(buf, ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("invalid number '" + std::string(s) + "'", line);
  }
  return v;
}

inline std::int64_t parse_int(std::string_view s, std::size_t line) {
  std::int64_t v = 0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("invalid integer '" + std::string(s) + "'", line);
  }
  return v;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return is;
}

}  // namespace detail

// Writes to a temporary next to `path`, then renames over it.
inline void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    os << contents;
    if (!os) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

inline std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------
// Dense matrices

inline std::string format_matrix_csv(const Matrix& X) {
  std::string out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (j) out += ',';
      out += detail::format_double(X(i, j));
    }
    out += '\n';
  }
  return out;
}

inline Matrix parse_matrix_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    std::vector<double> row;
    for (auto field : detail::split(body, ',')) {
      row.push_back(detail::parse_double(field, lineno));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged row: expected " + std::to_string(rows.front().size()) +
                           " fields, got " + std::to_string(row.size()),
                       lineno);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("empty matrix file", lineno);
  Matrix X(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return X;
}

inline void write_matrix_csv(const std::string& path, const Matrix& X) {
  write_file_atomic(path, format_matrix_csv(X));
}

inline Matrix read_matrix_csv(const std::string& path) {
  auto is = detail::open_in(path);
  return parse_matrix_csv(is);
}

// ---------------------------------------------------------------------------
// Sparse observations

inline std::string format_observations_csv(const CompletionObservations& obs) {
  std::string out = "row,col,count\n";
  for (const auto& e : obs.entries()) {
    out += std::to_string(e.row + 1) + ',' + std::to_string(e.col + 1) + ',' +
           std::to_string(e.count) + '\n';
  }
  return out;
}

inline void write_observations_csv(const std::string& path,
                                   const CompletionObservations& obs) {
  write_file_atomic(path, format_observations_csv(obs));
}

// The file does not carry the matrix shape, so the caller supplies it.
inline CompletionObservations parse_observations_csv(std::istream& is,
                                                     Eigen::Index rows,
                                                     Eigen::Index cols) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<ObservedEntry> entries;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    if (!header) {
      if (body != "row,col,count") {
        throw ParseError("expected header 'row,col,count'", lineno);
      }
      header = true;
      continue;
    }
    const auto f = detail::split(body, ',');
    if (f.size() != 3) throw ParseError("expected 3 fields", lineno);
    const auto r = detail::parse_int(f[0], lineno);
    const auto c = detail::parse_int(f[1], lineno);
    const auto y = detail::parse_int(f[2], lineno);
    if (r < 1 || r > rows || c < 1 || c > cols) {
      throw ParseError("index out of range", lineno);
    }
    if (y < 0) throw ParseError("negative count", lineno);
    entries.push_back({static_cast<Eigen::Index>(r - 1),
                       static_cast<Eigen::Index>(c - 1), y});
  }
  if (!header) throw ParseError("missing header 'row,col,count'", lineno);
  return CompletionObservations(rows, cols, std::move(entries));
}

inline CompletionObservations read_observations_csv(const std::string& path,
                                                    Eigen::Index rows,
                                                    Eigen::Index cols) {
  auto is = detail::open_in(path);
  return parse_observations_csv(is, rows, cols);
}

// Compressive counts: one integer per line.
inline std::string format_counts(const CompressiveObservations& y) {
  std::string out;
  for (auto c : y.counts) out += std::to_string(c) + '\n';
  return out;
}

inline CompressiveObservations read_counts(const std::string& path) {
  auto is = detail::open_in(path);
  CompressiveObservations y;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto v = detail::parse_int(body, lineno);
    if (v < 0) throw ParseError("negative count", lineno);
    y.counts.push_back(v);
  }
  return y;
}

// ---------------------------------------------------------------------------
// Hour x day count tables

struct CountTable {
  Matrix counts;  // hours x days, missing cells are 0
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> present;
  std::size_t missing = 0;

  // Present cells as observations (no subsampling).
  CompletionObservations as_observations() const {
    std::vector<ObservedEntry> entries;
    for (Eigen::Index i = 0; i < counts.rows(); ++i) {
      for (Eigen::Index j = 0; j < counts.cols(); ++j) {
        if (present(i, j)) {
          entries.push_back({i, j, static_cast<std::int64_t>(counts(i, j))});
        }
      }
    }
    return CompletionObservations(counts.rows(), counts.cols(), std::move(entries));
  }
};

// Rows of (hour, day, count), header "hour,day,count", 1-based indices.
// Shape is max index seen unless given. Duplicate cells are an error.
inline CountTable parse_count_csv(std::istream& is, Eigen::Index hours = 0,
                                  Eigen::Index days = 0) {
  struct Row {
    std::int64_t h, d, c;
  };
  std::vector<Row> rows;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<std::size_t> line_of;
  while (std::getline(is, line)) {
    ++lineno;
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    if (!header) {
      if (body != "hour,day,count") {
        throw ParseError("expected header 'hour,day,count'", lineno);
      }
      header = true;
      continue;
    }
    const auto f = detail::split(body, ',');
    if (f.size() != 3) throw ParseError("expected 3 fields", lineno);
    Row r{detail::parse_int(f[0], lineno), detail::parse_int(f[1], lineno),
          detail::parse_int(f[2], lineno)};
    if (r.h < 1 || r.d < 1) throw ParseError("indices are 1-based", lineno);
    if (r.c < 0) throw ParseError("negative count", lineno);
    rows.push_back(r);
    line_of.push_back(lineno);
  }
  if (!header) throw ParseError("missing header 'hour,day,count'", lineno);
  Eigen::Index H = hours, D = days;
  for (const auto& r : rows) {
    if (hours == 0) H = std::max<Eigen::Index>(H, r.h);
    if (days == 0) D = std::max<Eigen::Index>(D, r.d);
  }
  if (H == 0 || D == 0) throw ParseError("no data rows", lineno);
  CountTable t;
  t.counts = Matrix::Zero(H, D);
  t.present = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(H, D, false);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    if (r.h > H || r.d > D) throw ParseError("index outside table shape", line_of[k]);
    auto i = static_cast<Eigen::Index>(r.h - 1);
    auto j = static_cast<Eigen::Index>(r.d - 1);
    if (t.present(i, j)) {
      throw ParseError("duplicate (hour, day) = (" + std::to_string(r.h) + ", " +
                           std::to_string(r.d) + ")",
                       line_of[k]);
    }
    t.present(i, j) = true;
    t.counts(i, j) = static_cast<double>(r.c);
  }
  t.missing = static_cast<std::size_t>(H * D - static_cast<Eigen::Index>(rows.size()));
  return t;
}

inline CountTable load_count_csv(const std::string& path, Eigen::Index hours = 0,
                                 Eigen::Index days = 0) {
  auto is = detail::open_in(path);
  return parse_count_csv(is, hours, days);
}

// Column-major series (hour fastest) reshaped into hours x days.
inline Matrix reshape_hours_by_days(const std::vector<double>& hourly,
                                    Eigen::Index hours) {
  if (hours < 1 || hourly.size() % static_cast<std::size_t>(hours) != 0) {
    throw DimensionError("reshape_hours_by_days: length not a multiple of hours");
  }
  const auto days = static_cast<Eigen::Index>(hourly.size()) / hours;
  Matrix M(hours, days);
  for (Eigen::Index d = 0; d < days; ++d) {
    for (Eigen::Index h = 0; h < hours; ++h) {
      M(h, d) = hourly[static_cast<std::size_t>(d * hours + h)];
    }
  }
  return M;
}

// ---------------------------------------------------------------------------
// PGM (P2)

struct GrayImage {
  Matrix pixels;  // H x W
  int max_value = 255;
};

inline GrayImage parse_pgm(std::istream& is) {
  // Tokenize, dropping '#' comments.
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.size() < 4 || tokens[0] != "P2") {
    throw ParseError("not an ASCII PGM (P2) file", 1);
  }
  const auto W = detail::parse_int(tokens[1], 1);
  const auto H = detail::parse_int(tokens[2], 1);
  const auto maxv = detail::parse_int(tokens[3], 1);
  if (W < 1 || H < 1 || maxv < 1) throw ParseError("invalid PGM header", 1);
  if (tokens.size() != static_cast<std::size_t>(4 + W * H)) {
    throw ParseError("PGM pixel count mismatch", 1);
  }
  GrayImage img;
  img.max_value = static_cast<int>(maxv);
  img.pixels.resize(H, W);
  std::size_t k = 4;
  for (Eigen::Index i = 0; i < H; ++i) {
    for (Eigen::Index j = 0; j < W; ++j) {
      const auto v = detail::parse_int(tokens[k++], 1);
      if (v < 0 || v > maxv) throw ParseError("PGM pixel out of range", 1);
      img.pixels(i, j) = static_cast<double>(v);
    }
  }
  return img;
}

inline GrayImage read_pgm(const std::string& path) {
  auto is = detail::open_in(path);
  return parse_pgm(is);
}

// Pixels are rounded and clipped to [0, max_value].
inline std::string format_pgm(const Matrix& pixels, int max_value = 255) {
  std::string out = "P2\n" + std::to_string(pixels.cols()) + " " +
                    std::to_string(pixels.rows()) + "\n" + std::to_string(max_value) +
                    "\n";
  for (Eigen::Index i = 0; i < pixels.rows(); ++i) {
    for (Eigen::Index j = 0; j < pixels.cols(); ++j) {
      if (j) out += ' ';
      const double v = std::clamp(std::round(pixels(i, j)), 0.0,
                                  static_cast<double>(max_value));
      out += std::to_string(static_cast<int>(v));
    }
    out += '\n';
  }
  return out;
}

inline void write_pgm(const std::string& path, const Matrix& pixels,
                      int max_value = 255) {
  write_file_atomic(path, format_pgm(pixels, max_value));
}

}  // namespace plr
