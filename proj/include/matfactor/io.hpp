#pragma once

#include "matfactor/linalg.hpp"
#include "matfactor/series.hpp"

#include <filesystem>
#include <iosfwd>

namespace matfactor {

/// Long-format panel CSV: header `t,row,col,value`, 1-based indices, one
/// observation per line. Dimensions are the maximum indices seen. Triples
/// that never appear, or whose value field is empty or `NA`, are missing.
struct PanelRead {
  MatrixSeries series;
  /// Number of entries filled by exponential smoothing.
  int imputed = 0;
};

PanelRead read_panel(std::istream& in);
PanelRead read_panel(const std::filesystem::path& path);

/// Writes every entry with 17 significant digits, ordered by t, col, row.
void write_panel(std::ostream& out, const MatrixSeries& y);
void write_panel(const std::filesystem::path& path, const MatrixSeries& y);

/// Factor series CSV with header `t,i,j,value` (1-based).
void write_factor_series(std::ostream& out, const MatrixSeries& x);

/// Simple exponential smoothing over NaN gaps: the level follows
/// l_t = a x_t + (1 - a) l_{t-1} on observed points, gaps take the current
/// level and leading gaps take the first observation. Throws AllMissing when
/// nothing is observed.
Vector impute_es(const Vector& x, double alpha_s = 0.3);

/// Shortest decimal text that round-trips through strtod (17 significant digits).
std::string format_double(double v);

}  // namespace matfactor
