#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nullgeo/errors.hpp"
#include "nullgeo/runner.hpp"
#include "nullgeo/scenario.hpp"

namespace {

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* what) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw nullgeo::Error(std::string("expected NAME=VALUE for ") + what);
  return {s.substr(0, eq), s.substr(eq + 1)};
}

double to_double(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw nullgeo::Error("'" + s + "' is not a number (" + context + ")");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for null submanifolds of almost contact metric manifolds"};
  app.require_subcommand(1);

  std::string target, format = "text";
  int samples = -1;
  long long seed = -1;
  std::vector<std::string> tols, params, mutations;
  std::string only;
  auto* check = app.add_subcommand("check", "run checks on a scenario file or builtin:NAME");
  check->add_option("scenario", target, "path or builtin:NAME")->required();
  check->add_option("--samples", samples, "number of sample points");
  check->add_option("--seed", seed, "sampling seed");
  check->add_option("--tol", tols, "tolerance override FAMILY=VALUE")->take_all();
  check->add_option("--only", only, "comma-separated check families");
  check->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_option("--param", params, "runtime constant NAME=VALUE");
  check->add_option("--mutate", mutations, "KIND:I,J:DELTA single-entry perturbation");

  auto* list = app.add_subcommand("list", "list builtin scenarios and check families");
  std::string show_name;
  auto* show = app.add_subcommand("show", "print the JSON of a builtin scenario");
  show->add_option("name", show_name, "builtin name")->required();

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    std::cout << "builtins:\n";
    for (const auto& n : nullgeo::builtin_names()) std::cout << "  builtin:" << n << "\n";
    std::cout << "families:\n";
    for (const auto& f : nullgeo::check_families()) std::cout << "  " << f << "\n";
    return 0;
  }
  if (show->parsed()) {
    try {
      std::cout << nullgeo::builtin_text(show_name) << "\n";
      return 0;
    } catch (const nullgeo::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }

  nullgeo::ScenarioDocument doc;
  nullgeo::RunOptions opt;
  try {
    doc = nullgeo::load_scenario(target);
    for (const auto& p : params) {
      auto [name, value] = split_assignment(p, "--param");
      nullgeo::set_param(doc, name, to_double(value, "--param " + name));
    }
    for (const auto& m : mutations) nullgeo::apply_mutation(doc, m);
    if (samples >= 0) opt.samples = samples;
    if (seed >= 0) opt.seed = static_cast<std::uint64_t>(seed);
    for (const auto& t : tols) {
      auto [key, value] = split_assignment(t, "--tol");
      if (!nullgeo::default_tolerances().count(key)) throw nullgeo::Error("unknown tolerance key '" + key + "'");
      opt.tolerances[key] = to_double(value, "--tol " + key);
    }
    if (!only.empty()) {
      std::stringstream ss(only);
      std::string f;
      while (std::getline(ss, f, ',')) {
        bool known = false;
        for (const auto& k : nullgeo::check_families()) known = known || k == f;
        if (!known) throw nullgeo::Error("unknown check family '" + f + "'");
        opt.only.insert(f);
      }
    }
    if (const char* scale = std::getenv("NULLGEO_TOL_SCALE")) {
      opt.tol_scale = to_double(scale, "NULLGEO_TOL_SCALE");
      if (!(opt.tol_scale > 0.0)) throw nullgeo::Error("NULLGEO_TOL_SCALE must be positive");
    }
  } catch (const nullgeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  nullgeo::CheckReport report = nullgeo::run_checks(doc, opt);
  std::cout << nullgeo::emit_report(report, format);
  if (format == "json") std::cout << "\n";
  return report.summary().failed == 0 ? 0 : 1;
}
