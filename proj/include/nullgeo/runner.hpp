#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nullgeo/check_report.hpp"
#include "nullgeo/scenario.hpp"

namespace nullgeo {

// Check families accepted by selectors.
const std::vector<std::string>& check_families();

struct RunOptions {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::map<std::string, double> tolerances;  // per key, override scenario values
  std::set<std::string> only;                // empty means every family
  double tol_scale = 1.0;                    // multiplies every tolerance
  int gauss_tuples = 20;
  int spaceform_tuples = 50;
};

// Scenario value, then option override, then the scale. Throws Error for an
// unknown key.
double resolve_tolerance(const ScenarioDocument& doc, const RunOptions& opt, const std::string& key);

// Module errors become failed records; nothing here throws for a loaded
// document except for invalid selectors.
CheckReport run_checks(const ScenarioDocument& doc, const RunOptions& opt = {});

// format is "text" or "json".
std::string emit_report(const CheckReport& report, const std::string& format);

}  // namespace nullgeo
