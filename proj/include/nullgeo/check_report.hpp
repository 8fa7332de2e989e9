#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nullgeo {

enum class Verdict { Pass, Fail, Skip };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct CheckRecord {
  std::string check_id;
  int point_index = -1;  // -1 for scenario-level records
  double residual = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::Pass;
  std::string note;

  bool operator==(const CheckRecord&) const = default;
};

// Pass iff residual <= tol (NaN fails).
CheckRecord make_record(std::string id, int point, double residual, double tol, std::string note = {});
CheckRecord skip_record(std::string id, int point, std::string reason);
// A record whose verdict is decided by the caller, e.g. lower-bound checks.
CheckRecord bool_record(std::string id, int point, bool ok, double measured, double threshold, std::string note);

struct DiscrepancyFlag {
  std::string id;
  std::string note;
  bool operator==(const DiscrepancyFlag&) const = default;
};

// Least-squares transversal curvature vector at one sample point,
// in frame coordinates (ltr part then screen-transversal part).
struct HFitEntry {
  int point_index = 0;
  std::vector<double> lightlike;
  std::vector<double> screen_transversal;
  double residual = 0.0;
  bool operator==(const HFitEntry&) const = default;
};

struct DerivedValues {
  std::optional<double> cbar;
  std::string cbar_source;  // ms455-formula | s30-relation | declared
  std::vector<HFitEntry> h_fit;
  std::vector<DiscrepancyFlag> discrepancy_flags;
  bool operator==(const DerivedValues&) const = default;
};

struct Summary {
  int total = 0;
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  bool operator==(const Summary&) const = default;
};

inline const std::vector<std::string>& verdict_names() {
  static const std::vector<std::string> names{"qgcr",         "ascreen",        "proper",    "umbilical", "geodesic",
                                              "irrotational", "mixed_geodesic", "d_geodesic"};
  return names;
}

struct CheckReport {
  int schema_version = 1;
  std::string scenario;
  unsigned long long seed = 0;
  int samples = 0;
  std::vector<CheckRecord> records;
  std::map<std::string, std::optional<bool>> verdicts = empty_verdicts();
  DerivedValues derived;

  static std::map<std::string, std::optional<bool>> empty_verdicts() {
    std::map<std::string, std::optional<bool>> m;
    for (const auto& n : verdict_names()) m[n] = std::nullopt;
    return m;
  }

  Summary summary() const;
  // Orders records by check id, then point index (stable for equal keys).
  void sort_records();
  bool operator==(const CheckReport&) const = default;
};

std::string report_to_json(const CheckReport& report);
CheckReport report_from_json(const std::string& text);
// Human-readable: summary, verdicts, then failures worst-residual first.
std::string report_to_text(const CheckReport& report);

}  // namespace nullgeo
