#include "matfactor/io.hpp"

#include "matfactor/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace matfactor {

std::string format_double(double v) {
  char buf[40];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

Vector impute_es(const Vector& x, double alpha_s) {
  require(alpha_s > 0.0 && alpha_s <= 1.0, ErrorKind::InvalidInput,
          "impute_es: alpha_s must lie in (0, 1]");
  Eigen::Index first = 0;
  while (first < x.size() && std::isnan(x(first))) ++first;
  require(first < x.size(), ErrorKind::AllMissing, "impute_es: series has no observed value");
  Vector out = x;
  for (Eigen::Index t = 0; t < first; ++t) out(t) = x(first);
  double level = x(first);
  for (Eigen::Index t = first + 1; t < x.size(); ++t) {
    if (std::isnan(x(t))) {
      out(t) = level;
    } else {
      level = alpha_s * x(t) + (1.0 - alpha_s) * level;
    }
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

long parse_index(std::string_view field, std::size_t line, const char* name) {
  field = trim(field);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || v < 1)
    parse_error(line, std::string("invalid ") + name + " index '" + std::string(field) + "'");
  return v;
}

double parse_value(std::string_view field, std::size_t line) {
  field = trim(field);
  if (field.empty() || field == "NA") return std::numeric_limits<double>::quiet_NaN();
  const std::string text(field);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(v))
    parse_error(line, "non-numeric value '" + text + "'");
  return v;
}

struct Entry {
  long t;
  long row;
  long col;
  double value;
};

}  // namespace

PanelRead read_panel(std::istream& in) {
  std::string text;
  std::size_t line_no = 1;
  require(static_cast<bool>(std::getline(in, text)), ErrorKind::ParseError,
          "line 1: missing header");
  require(trim(text) == "t,row,col,value", ErrorKind::ParseError,
          "line 1: header must be exactly 't,row,col,value'");

  std::vector<Entry> entries;
  long T = 0;
  long p1 = 0;
  long p2 = 0;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string_view line = trim(text);
    if (line.empty()) continue;
    std::string_view fields[4];
    std::size_t start = 0;
    int n = 0;
    for (; n < 4; ++n) {
      const std::size_t comma = line.find(',', start);
      if (n < 3 && comma == std::string_view::npos) parse_error(line_no, "expected 4 fields");
      if (n == 3 && comma != std::string_view::npos) parse_error(line_no, "expected 4 fields");
      fields[n] = line.substr(start, n < 3 ? comma - start : std::string_view::npos);
      start = comma + 1;
    }
    Entry e{parse_index(fields[0], line_no, "t"), parse_index(fields[1], line_no, "row"),
            parse_index(fields[2], line_no, "col"), parse_value(fields[3], line_no)};
    T = std::max(T, e.t);
    p1 = std::max(p1, e.row);
    p2 = std::max(p2, e.col);
    entries.push_back(e);
  }
  require(!entries.empty(), ErrorKind::InsufficientData, "read_panel: no observations");

  const std::size_t d = static_cast<std::size_t>(p1 * p2);
  std::vector<char> seen(d * static_cast<std::size_t>(T), 0);
  Matrix data = Matrix::Constant(p1 * p2, T, std::numeric_limits<double>::quiet_NaN());
  for (const Entry& e : entries) {
    const long r = (e.col - 1) * p1 + (e.row - 1);
    const std::size_t key = static_cast<std::size_t>(e.t - 1) * d + static_cast<std::size_t>(r);
    require(!seen[key], ErrorKind::DuplicateEntry,
            "duplicate entry (t=" + std::to_string(e.t) + ", row=" + std::to_string(e.row) +
                ", col=" + std::to_string(e.col) + ")");
    seen[key] = 1;
    data(r, e.t - 1) = e.value;
  }

  PanelRead out;
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    const Vector path = data.row(r).transpose();
    const auto gaps = static_cast<int>(path.array().isNaN().count());
    if (gaps == 0) continue;
    if (gaps == path.size())
      fail(ErrorKind::AllMissing, "entry (row=" + std::to_string(r % p1 + 1) +
                                      ", col=" + std::to_string(r / p1 + 1) +
                                      ") has no observed value");
    data.row(r) = impute_es(path).transpose();
    out.imputed += gaps;
  }
  out.series = MatrixSeries(p1, p2, std::move(data));
  return out;
}

PanelRead read_panel(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::Io, "cannot open '" + path.string() + "'");
  return read_panel(in);
}

void write_panel(std::ostream& out, const MatrixSeries& y) {
  out << "t,row,col,value\n";
  for (Eigen::Index t = 0; t < y.length(); ++t) {
    const auto m = y.at(t);
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      for (Eigen::Index i = 0; i < y.rows(); ++i)
        out << t + 1 << ',' << i + 1 << ',' << j + 1 << ',' << format_double(m(i, j)) << '\n';
  }
}

void write_panel(const std::filesystem::path& path, const MatrixSeries& y) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write '" + path.string() + "'");
  write_panel(out, y);
  require(out.good(), ErrorKind::Io, "write failed for '" + path.string() + "'");
}

void write_factor_series(std::ostream& out, const MatrixSeries& x) {
  out << "t,i,j,value\n";
  for (Eigen::Index t = 0; t < x.length(); ++t) {
    const auto m = x.at(t);
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      for (Eigen::Index j = 0; j < x.cols(); ++j)
        out << t + 1 << ',' << i + 1 << ',' << j + 1 << ',' << format_double(m(i, j)) << '\n';
  }
}

}  // namespace matfactor
