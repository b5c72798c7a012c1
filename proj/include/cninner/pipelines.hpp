#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "cninner/zero_sequence.hpp"

namespace cninner {

struct CsvTable {
  std::string name;  // file stem
  std::string text;  // header row, '.' decimal point, '\n' line ends
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  nlohmann::json report;  // no clocks or host data, so reruns compare byte for byte
  std::vector<CsvTable> tables;
  std::vector<Check> checks;
  bool budget_exhausted = false;

  bool ok() const;
};

/// command: reproduce (config "target": prop1-demo | prop3 | thm1 | e8),
/// eval-grid, wep, cn-fit, carleson, area, level-solve. Expressions and zero
/// sets come inline in the config as JSON. Bad configs throw Error.
RunResult run_command(const std::string& command, const nlohmann::json& config);

const char* library_version() noexcept;

namespace fixtures {

/// 1 - 2^-k and 1 - 1.5 * 2^-k for k = 1..count.
ZeroSequence interleaved_radii(int count = 10);

/// Three zeros within rho ~ 1e-7 of 0.3 + 0.2i plus a lone zero at -0.5.
ZeroSequence triple_cluster();
inline constexpr double kClusterCenterRe = 0.3, kClusterCenterIm = 0.2;

}  // namespace fixtures

}  // namespace cninner
