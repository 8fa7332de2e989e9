#include "nullgeo/check_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nullgeo/errors.hpp"

namespace nullgeo {

using ojson = nlohmann::ordered_json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Skip:
      return "skip";
  }
  return "fail";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "pass") return Verdict::Pass;
  if (s == "fail") return Verdict::Fail;
  if (s == "skip") return Verdict::Skip;
  throw Error("unknown verdict '" + s + "'");
}

CheckRecord make_record(std::string id, int point, double residual, double tol, std::string note) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.point_index = point;
  r.residual = std::isfinite(residual) ? residual : 1e300;
  r.tol = tol;
  r.verdict = (std::isfinite(residual) && residual <= tol) ? Verdict::Pass : Verdict::Fail;
  if (!std::isfinite(residual)) note += note.empty() ? "non-finite residual" : "; non-finite residual";
  r.note = std::move(note);
  return r;
}

CheckRecord skip_record(std::string id, int point, std::string reason) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.point_index = point;
  r.verdict = Verdict::Skip;
  r.note = std::move(reason);
  return r;
}

CheckRecord bool_record(std::string id, int point, bool ok, double measured, double threshold, std::string note) {
  CheckRecord r;
  r.check_id = std::move(id);
  r.point_index = point;
  r.residual = std::isfinite(measured) ? measured : 1e300;
  r.tol = threshold;
  r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  r.note = std::move(note);
  return r;
}

Summary CheckReport::summary() const {
  Summary s;
  s.total = static_cast<int>(records.size());
  for (const auto& r : records) {
    switch (r.verdict) {
      case Verdict::Pass:
        ++s.passed;
        break;
      case Verdict::Fail:
        ++s.failed;
        break;
      case Verdict::Skip:
        ++s.skipped;
        break;
    }
  }
  return s;
}

void CheckReport::sort_records() {
  std::stable_sort(records.begin(), records.end(), [](const CheckRecord& a, const CheckRecord& b) {
    if (a.check_id != b.check_id) return a.check_id < b.check_id;
    return a.point_index < b.point_index;
  });
}

namespace {

ojson optional_bool(const std::optional<bool>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::string report_to_json(const CheckReport& report) {
  ojson j;
  j["schema_version"] = report.schema_version;
  j["scenario"] = report.scenario;
  j["seed"] = report.seed;
  j["samples"] = report.samples;
  Summary s = report.summary();
  j["summary"] = {{"total", s.total}, {"passed", s.passed}, {"failed", s.failed}, {"skipped", s.skipped}};
  ojson verdicts = ojson::object();
  for (const auto& name : verdict_names()) {
    auto it = report.verdicts.find(name);
    verdicts[name] = it == report.verdicts.end() ? ojson(nullptr) : optional_bool(it->second);
  }
  j["verdicts"] = verdicts;
  ojson derived;
  derived["cbar"] = report.derived.cbar ? ojson(*report.derived.cbar) : ojson(nullptr);
  derived["cbar_source"] = report.derived.cbar_source;
  ojson fits = ojson::array();
  for (const auto& f : report.derived.h_fit)
    fits.push_back({{"point_index", f.point_index},
                    {"lightlike", f.lightlike},
                    {"screen_transversal", f.screen_transversal},
                    {"residual", f.residual}});
  derived["H_fit"] = fits;
  ojson flags = ojson::array();
  for (const auto& f : report.derived.discrepancy_flags) flags.push_back({{"id", f.id}, {"note", f.note}});
  derived["discrepancy_flags"] = flags;
  j["derived"] = derived;
  ojson records = ojson::array();
  for (const auto& r : report.records)
    records.push_back({{"check_id", r.check_id},
                       {"point_index", r.point_index},
                       {"residual", r.residual},
                       {"tol", r.tol},
                       {"verdict", to_string(r.verdict)},
                       {"note", r.note}});
  j["records"] = records;
  return j.dump(2) + "\n";
}

CheckReport report_from_json(const std::string& text) {
  ojson j = ojson::parse(text);
  CheckReport r;
  r.schema_version = j.at("schema_version").get<int>();
  r.scenario = j.at("scenario").get<std::string>();
  r.seed = j.at("seed").get<unsigned long long>();
  r.samples = j.at("samples").get<int>();
  for (const auto& [name, v] : j.at("verdicts").items())
    r.verdicts[name] = v.is_null() ? std::nullopt : std::optional<bool>(v.get<bool>());
  const auto& d = j.at("derived");
  if (!d.at("cbar").is_null()) r.derived.cbar = d.at("cbar").get<double>();
  r.derived.cbar_source = d.at("cbar_source").get<std::string>();
  for (const auto& f : d.at("H_fit")) {
    HFitEntry e;
    e.point_index = f.at("point_index").get<int>();
    e.lightlike = f.at("lightlike").get<std::vector<double>>();
    e.screen_transversal = f.at("screen_transversal").get<std::vector<double>>();
    e.residual = f.at("residual").get<double>();
    r.derived.h_fit.push_back(std::move(e));
  }
  for (const auto& f : d.at("discrepancy_flags"))
    r.derived.discrepancy_flags.push_back({f.at("id").get<std::string>(), f.at("note").get<std::string>()});
  for (const auto& rec : j.at("records")) {
    CheckRecord c;
    c.check_id = rec.at("check_id").get<std::string>();
    c.point_index = rec.at("point_index").get<int>();
    c.residual = rec.at("residual").get<double>();
    c.tol = rec.at("tol").get<double>();
    c.verdict = verdict_from_string(rec.at("verdict").get<std::string>());
    c.note = rec.at("note").get<std::string>();
    r.records.push_back(std::move(c));
  }
  return r;
}

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string verdict_word(const std::optional<bool>& v) {
  if (!v) return "n/a";
  return *v ? "true" : "false";
}

}  // namespace

std::string report_to_text(const CheckReport& report) {
  std::ostringstream os;
  Summary s = report.summary();
  os << "scenario " << report.scenario << " (samples " << report.samples << ", seed " << report.seed << ")\n";
  os << "checks: " << s.total << " total, " << s.passed << " passed, " << s.failed << " failed, " << s.skipped
     << " skipped\n";
  os << "verdicts:";
  for (const auto& name : verdict_names()) {
    auto it = report.verdicts.find(name);
    os << ' ' << name << '=' << (it == report.verdicts.end() ? "n/a" : verdict_word(it->second));
  }
  os << '\n';
  if (report.derived.cbar)
    os << "cbar: " << *report.derived.cbar << " (" << report.derived.cbar_source << ")\n";
  for (const auto& f : report.derived.discrepancy_flags) os << "discrepancy [" << f.id << "]: " << f.note << '\n';

  std::vector<const CheckRecord*> failed;
  for (const auto& r : report.records)
    if (r.verdict == Verdict::Fail) failed.push_back(&r);
  std::stable_sort(failed.begin(), failed.end(),
                   [](const CheckRecord* a, const CheckRecord* b) { return a->residual > b->residual; });
  for (const CheckRecord* r : failed) {
    os << "FAIL " << r->check_id << " @" << r->point_index << " residual " << fmt_double(r->residual) << " tol "
       << fmt_double(r->tol);
    if (!r->note.empty()) os << "  " << r->note;
    os << '\n';
  }
  return os.str();
}

}  // namespace nullgeo
