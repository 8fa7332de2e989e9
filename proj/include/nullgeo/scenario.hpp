#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nullgeo/nullsub.hpp"

namespace nullgeo {

// A published statement about a computed quantity. `quantity` is currently
// "nabla_tangential": the coefficient of `component` in nabla_X Y.
struct Claim {
  std::string id;
  std::string quantity;
  std::string x, y, component;
  std::optional<Expression> printed;  // over ambient coordinates
  std::optional<Expression> derived;  // over ambient coordinates
  std::vector<std::string> parallel;  // nabla_X Y should stay in the span of these
  std::string remark;
};

struct ScenarioNote {
  std::string id;
  std::string text;
};

struct ScenarioDocument {
  int schema_version = 1;
  SubmanifoldScenario sc;
  std::map<std::string, double> tolerances;
  std::optional<double> declared_cbar;
  std::map<std::string, bool> expect;  // verdict name -> expected value
  std::optional<double> expect_cbar;
  std::vector<Claim> claims;
  std::vector<ScenarioNote> notes;
  std::string source;  // file path or builtin:NAME
};

// Tolerance per key; keys are the check families plus lemma52 and lems11.
const std::map<std::string, double>& default_tolerances();

// Throws SchemaError (with a JSON pointer), ParseError or UnknownSymbolError.
ScenarioDocument parse_scenario(const std::string& text, const std::string& source = "<memory>");
// `spec` is a file path or builtin:NAME. Unknown builtins and unreadable files
// raise SchemaError with path "/".
ScenarioDocument load_scenario(const std::string& spec);

// Names and JSON text of the registered builtins.
std::vector<std::string> builtin_names();
const std::string& builtin_text(const std::string& name);

// Overrides a runtime constant; unknown names raise SchemaError.
void set_param(ScenarioDocument& doc, const std::string& name, double value);

// Single-entry perturbation: phi:I,J:DELTA, metric:I,J:DELTA (symmetric) or
// frame:NAME,K:DELTA. Indices are 0-based; DELTA is expression text.
void apply_mutation(ScenarioDocument& doc, const std::string& spec);

}  // namespace nullgeo
