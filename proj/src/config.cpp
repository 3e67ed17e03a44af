#include "matfactor/config.hpp"

#include "matfactor/error.hpp"

#include <string>

namespace matfactor {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SingularBracket: return "SingularBracket";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::DegenerateComponent: return "DegenerateComponent";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::Degenerate: return "Degenerate";
    case ErrorKind::OrderZero: return "OrderZero";
    case ErrorKind::DuplicateEntry: return "DuplicateEntry";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::AllMissing: return "AllMissing";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::string_view to_string(TestMethod method) noexcept {
  switch (method) {
    case TestMethod::LjungBox: return "ljung-box";
    case TestMethod::TsayRank: return "tsay-rank";
    case TestMethod::CyzMax: return "cyz-max";
    case TestMethod::Auto: return "auto";
  }
  return "unknown";
}

TestMethod parse_test_method(std::string_view name) {
  if (name == "ljung-box") return TestMethod::LjungBox;
  if (name == "tsay-rank") return TestMethod::TsayRank;
  if (name == "cyz-max") return TestMethod::CyzMax;
  if (name == "auto") return TestMethod::Auto;
  fail(ErrorKind::InvalidInput, "unknown test method '" + std::string(name) + "'");
}

std::string_view to_string(ColumnRule rule) noexcept {
  return rule == ColumnRule::FirstAccept ? "first-accept" : "first-reject";
}

ColumnRule parse_column_rule(std::string_view name) {
  if (name == "first-accept") return ColumnRule::FirstAccept;
  if (name == "first-reject") return ColumnRule::FirstReject;
  fail(ErrorKind::InvalidInput, "unknown column rule '" + std::string(name) + "'");
}

void EstimationConfig::validate() const {
  require(k0 >= 1, ErrorKind::InvalidInput, "k0 must be at least 1");
  require(eta > 0.0, ErrorKind::InvalidInput, "eta must be positive");
  require(s0 >= 0, ErrorKind::InvalidInput, "s0 must be non-negative");
  require(alpha > 0.0 && alpha < 1.0, ErrorKind::InvalidInput, "alpha must lie in (0, 1)");
  require(m >= 1, ErrorKind::InvalidInput, "m must be at least 1");
  require(epsilon > 0.0 && epsilon < 1.0, ErrorKind::InvalidInput, "epsilon must lie in (0, 1)");
  require(!ratio_cap || *ratio_cap >= 1, ErrorKind::InvalidInput, "ratio cap must be positive");
  require(n_boot >= 200, ErrorKind::InvalidInput, "n_boot must be at least 200");
}

}  // namespace matfactor
