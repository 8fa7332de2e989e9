#include "nullgeo/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nullgeo/errors.hpp"

namespace nullgeo {

using json = nlohmann::json;

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tols{
      {"frames", 1e-9},     {"acms", 1e-9},         {"nearly-cosymplectic", 1e-9},
      {"lemmas", 1e-8},     {"lemma52", 1e-10},     {"lems11", 1e-10},
      {"gw", 1e-8},         {"qgcr", 1e-8},         {"ascreen", 1e-8},
      {"umbilical", 1e-8},  {"irrotational", 1e-8}, {"mixed", 1e-8},
      {"d-geodesic", 1e-8}, {"gauss", 1e-5},        {"spaceform", 1e-8},
      {"expect", 1e-8}};
  return tols;
}

namespace {

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(child(path, key), "missing required field");
  return *it;
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw SchemaError(child(path, it.key()), "unknown field");
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
  return j.get<bool>();
}

std::vector<std::string> get_strings(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_string(j[i], child(path, i)));
  return out;
}

std::string number_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Expression text from a string or a number.
std::string expr_text(const json& j, const std::string& path) {
  if (j.is_number()) return number_text(j.get<double>());
  if (j.is_string()) return j.get<std::string>();
  throw SchemaError(path, "expected an expression string or a number");
}

Expression parse_at(const std::string& text, const std::vector<std::string>& coords,
                    const std::vector<std::string>& params, const std::string& path) {
  try {
    return Expression::parse(text, coords, params);
  } catch (const ParseError& e) {
    std::string why = e.what();
    auto cut = why.rfind(" at offset ");
    if (cut != std::string::npos) why.resize(cut);
    throw ParseError(path + ": cannot parse '" + text + "': " + why, e.position());
  } catch (const UnknownSymbolError& e) {
    throw SchemaError(path, std::string(e.what()) + " in '" + text + "'");
  }
}

int coord_index(const std::vector<std::string>& coords, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] == name) return static_cast<int>(i);
  throw SchemaError(path, "unknown coordinate '" + name + "'");
}

// Dense array of n entries, or an object {coord: expr} with zeros elsewhere.
std::vector<Expression> parse_components(const json& j, const std::vector<std::string>& coords,
                                         const std::vector<std::string>& params, const std::string& path) {
  const std::size_t n = coords.size();
  std::vector<std::string> texts(n, "0");
  if (j.is_array()) {
    if (j.size() != n) throw SchemaError(path, "expected " + std::to_string(n) + " components");
    for (std::size_t i = 0; i < n; ++i) texts[i] = expr_text(j[i], child(path, i));
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      texts[static_cast<std::size_t>(coord_index(coords, it.key(), child(path, it.key())))] =
          expr_text(it.value(), child(path, it.key()));
  } else {
    throw SchemaError(path, "expected an array or an object of components");
  }
  std::vector<Expression> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(parse_at(texts[i], coords, params, child(path, i)));
  return out;
}

// Dense n x n array, {"diagonal": [...]}, or {row: {col: expr}} with zeros elsewhere.
std::vector<Expression> parse_matrix(const json& j, const std::vector<std::string>& coords,
                                     const std::vector<std::string>& params, const std::string& path) {
  const std::size_t n = coords.size();
  std::vector<std::string> texts(n * n, "0");
  if (j.is_array()) {
    if (j.size() != n) throw SchemaError(path, "expected " + std::to_string(n) + " rows");
    for (std::size_t a = 0; a < n; ++a) {
      const json& row = j[a];
      if (!row.is_array() || row.size() != n)
        throw SchemaError(child(path, a), "expected a row of " + std::to_string(n) + " entries");
      for (std::size_t b = 0; b < n; ++b) texts[a * n + b] = expr_text(row[b], child(child(path, a), b));
    }
  } else if (j.is_object() && j.contains("diagonal")) {
    only_keys(j, {"diagonal"}, path);
    const json& d = j["diagonal"];
    if (!d.is_array() || d.size() != n)
      throw SchemaError(child(path, "diagonal"), "expected " + std::to_string(n) + " entries");
    for (std::size_t a = 0; a < n; ++a) texts[a * n + a] = expr_text(d[a], child(child(path, "diagonal"), a));
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      std::string rp = child(path, it.key());
      auto a = static_cast<std::size_t>(coord_index(coords, it.key(), rp));
      if (!it.value().is_object()) throw SchemaError(rp, "expected an object of entries");
      for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) {
        auto b = static_cast<std::size_t>(coord_index(coords, jt.key(), child(rp, jt.key())));
        texts[a * n + b] = expr_text(jt.value(), child(rp, jt.key()));
      }
    }
  } else {
    throw SchemaError(path, "expected a matrix");
  }
  std::vector<Expression> out;
  for (std::size_t k = 0; k < n * n; ++k)
    out.push_back(parse_at(texts[k], coords, params, child(child(path, k / n), k % n)));
  return out;
}

std::vector<NamedField> parse_frame_group(const json& j, const std::vector<std::string>& coords,
                                          const std::vector<std::string>& params, const std::string& path,
                                          std::set<std::string>& seen) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of frame fields");
  std::vector<NamedField> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string p = child(path, i);
    only_keys(j[i], {"name", "components"}, p);
    NamedField f;
    f.name = get_string(require(j[i], "name", p), child(p, "name"));
    if (!seen.insert(f.name).second) throw SchemaError(child(p, "name"), "duplicate frame field '" + f.name + "'");
    f.field.components = parse_components(require(j[i], "components", p), coords, params, child(p, "components"));
    out.push_back(std::move(f));
  }
  return out;
}

Signature parse_signature(const json& j, const std::string& path) {
  only_keys(j, {"negative", "positive"}, path);
  Signature s;
  s.negative = get_int(require(j, "negative", path), child(path, "negative"));
  s.positive = get_int(require(j, "positive", path), child(path, "positive"));
  return s;
}

const std::set<std::string>& verdict_set() {
  static const std::set<std::string> s(verdict_names().begin(), verdict_names().end());
  return s;
}

}  // namespace

ScenarioDocument parse_scenario(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("/", std::string("invalid JSON: ") + e.what());
  }
  only_keys(root, {"schema_version", "id", "ambient", "structure", "submanifold", "sampling", "params", "tolerances",
                   "cbar", "expect", "claims", "notes"},
            "");
  ScenarioDocument doc;
  doc.source = source;
  SubmanifoldScenario& sc = doc.sc;
  doc.schema_version = get_int(require(root, "schema_version", ""), "/schema_version");
  if (doc.schema_version != 1) throw SchemaError("/schema_version", "unsupported schema version");
  sc.id = get_string(require(root, "id", ""), "/id");

  // Runtime constants come first: every expression may use them.
  std::vector<std::string> consts;
  if (root.contains("params")) {
    const json& p = root["params"];
    if (!p.is_object()) throw SchemaError("/params", "expected an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      sc.bindings[it.key()] = get_number(it.value(), "/params/" + it.key());
      consts.push_back(it.key());
    }
  }

  const json& amb = require(root, "ambient", "");
  only_keys(amb, {"dim", "coords", "metric", "signature"}, "/ambient");
  int dim = get_int(require(amb, "dim", "/ambient"), "/ambient/dim");
  sc.coords = get_strings(require(amb, "coords", "/ambient"), "/ambient/coords");
  if (static_cast<int>(sc.coords.size()) != dim) throw SchemaError("/ambient/coords", "expected dim coordinates");
  sc.metric.dim = dim;
  sc.metric.components = parse_matrix(require(amb, "metric", "/ambient"), sc.coords, consts, "/ambient/metric");
  sc.metric.signature = parse_signature(require(amb, "signature", "/ambient"), "/ambient/signature");
  if (sc.metric.signature.negative + sc.metric.signature.positive != dim)
    throw SchemaError("/ambient/signature", "signature counts must add up to dim");

  if (root.contains("structure")) {
    const json& s = root["structure"];
    only_keys(s, {"phi", "xi", "eta"}, "/structure");
    AlmostContactStructure acs;
    acs.dim = dim;
    acs.phi = parse_matrix(require(s, "phi", "/structure"), sc.coords, consts, "/structure/phi");
    acs.xi.components = parse_components(require(s, "xi", "/structure"), sc.coords, consts, "/structure/xi");
    acs.eta.components = parse_components(require(s, "eta", "/structure"), sc.coords, consts, "/structure/eta");
    sc.structure = std::move(acs);
  }

  const json& sub = require(root, "submanifold", "");
  only_keys(sub, {"params", "param_map", "frames", "qgcr_decl"}, "/submanifold");
  sc.params = get_strings(require(sub, "params", "/submanifold"), "/submanifold/params");
  for (const auto& p : sc.params)
    if (sc.bindings.count(p)) throw SchemaError("/submanifold/params", "'" + p + "' is also a runtime constant");
  const json& pm = require(sub, "param_map", "/submanifold");
  if (!pm.is_object()) throw SchemaError("/submanifold/param_map", "expected an object keyed by coordinate");
  for (const auto& c : sc.coords) {
    std::string p = "/submanifold/param_map/" + c;
    if (!pm.contains(c)) throw SchemaError(p, "missing required field");
    sc.param_map.push_back(parse_at(expr_text(pm[c], p), sc.params, consts, p));
  }
  for (auto it = pm.begin(); it != pm.end(); ++it) coord_index(sc.coords, it.key(), "/submanifold/param_map/" + it.key());

  const json& fr = require(sub, "frames", "/submanifold");
  only_keys(fr, {"rad", "screen", "ltr", "stransversal"}, "/submanifold/frames");
  std::set<std::string> seen;
  const std::string fp = "/submanifold/frames";
  sc.rad = parse_frame_group(require(fr, "rad", fp), sc.coords, consts, fp + "/rad", seen);
  sc.screen = parse_frame_group(require(fr, "screen", fp), sc.coords, consts, fp + "/screen", seen);
  sc.ltr = parse_frame_group(require(fr, "ltr", fp), sc.coords, consts, fp + "/ltr", seen);
  if (fr.contains("stransversal"))
    sc.stransversal = parse_frame_group(fr["stransversal"], sc.coords, consts, fp + "/stransversal", seen);
  if (sc.ltr.size() != sc.rad.size()) throw SchemaError(fp + "/ltr", "needs one field per radical field");
  if (static_cast<int>(sc.rad.size() + sc.screen.size()) != sc.m())
    throw SchemaError(fp + "/screen", "radical and screen fields must number the submanifold parameters");
  if (sc.m() + sc.r() + sc.q() != dim) throw SchemaError(fp, "frame sizes must add up to the ambient dimension");

  if (sub.contains("qgcr_decl")) {
    const std::string qp = "/submanifold/qgcr_decl";
    const json& q = sub["qgcr_decl"];
    only_keys(q, {"d1", "d2", "d0", "l", "s", "phi_d2", "phi_l", "phi_s"}, qp);
    QgcrDecl& d = sc.qgcr;
    auto names = [&](const char* key, std::vector<std::string>& dst) {
      if (!q.contains(key)) return;
      dst = get_strings(q[key], qp + "/" + key);
      for (std::size_t i = 0; i < dst.size(); ++i)
        if (sc.frame_index(dst[i]) < 0)
          throw SchemaError(child(qp + "/" + key, i), "unknown frame field '" + dst[i] + "'");
    };
    names("d1", d.d1);
    names("d2", d.d2);
    names("d0", d.d0);
    names("l", d.l);
    names("s", d.s);
    names("phi_d2", d.phi_d2);
    names("phi_l", d.phi_l);
    names("phi_s", d.phi_s);
    d.declared = true;
  }

  for (const auto& p : sc.params) sc.boxes.push_back({p, -1.0, 1.0});
  if (root.contains("sampling")) {
    const json& s = root["sampling"];
    only_keys(s, {"boxes", "count", "seed"}, "/sampling");
    if (s.contains("count")) {
      sc.count = get_int(s["count"], "/sampling/count");
      if (sc.count < 0) throw SchemaError("/sampling/count", "must be non-negative");
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw SchemaError("/sampling/seed", "expected a non-negative integer");
      sc.seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("boxes")) {
      const json& b = s["boxes"];
      if (!b.is_object()) throw SchemaError("/sampling/boxes", "expected an object keyed by parameter");
      for (auto it = b.begin(); it != b.end(); ++it) {
        std::string p = "/sampling/boxes/" + it.key();
        auto pos = std::find(sc.params.begin(), sc.params.end(), it.key());
        if (pos == sc.params.end()) throw SchemaError(p, "unknown parameter");
        if (!it.value().is_array() || it.value().size() != 2) throw SchemaError(p, "expected [lo, hi]");
        SampleBox& box = sc.boxes[static_cast<std::size_t>(pos - sc.params.begin())];
        box.lo = get_number(it.value()[0], p + "/0");
        box.hi = get_number(it.value()[1], p + "/1");
        if (!(box.lo <= box.hi)) throw SchemaError(p, "lo must not exceed hi");
      }
    }
  }

  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    if (!t.is_object()) throw SchemaError("/tolerances", "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      std::string p = "/tolerances/" + it.key();
      if (!default_tolerances().count(it.key())) throw SchemaError(p, "unknown tolerance key");
      double v = get_number(it.value(), p);
      if (!(v > 0.0)) throw SchemaError(p, "must be positive");
      doc.tolerances[it.key()] = v;
    }
  }

  if (root.contains("cbar")) doc.declared_cbar = get_number(root["cbar"], "/cbar");

  if (root.contains("expect")) {
    const json& e = root["expect"];
    if (!e.is_object()) throw SchemaError("/expect", "expected an object");
    for (auto it = e.begin(); it != e.end(); ++it) {
      std::string p = "/expect/" + it.key();
      if (it.key() == "cbar")
        doc.expect_cbar = get_number(it.value(), p);
      else if (verdict_set().count(it.key()))
        doc.expect[it.key()] = get_bool(it.value(), p);
      else
        throw SchemaError(p, "unknown verdict");
    }
  }

  if (root.contains("claims")) {
    const json& cl = root["claims"];
    if (!cl.is_array()) throw SchemaError("/claims", "expected an array");
    for (std::size_t i = 0; i < cl.size(); ++i) {
      std::string p = child("/claims", i);
      only_keys(cl[i], {"id", "quantity", "X", "Y", "component", "printed", "derived", "parallel", "remark"}, p);
      Claim c;
      c.id = get_string(require(cl[i], "id", p), p + "/id");
      c.quantity = get_string(require(cl[i], "quantity", p), p + "/quantity");
      if (c.quantity != "nabla_tangential") throw SchemaError(p + "/quantity", "unsupported quantity");
      auto field = [&](const char* key) {
        std::string name = get_string(require(cl[i], key, p), p + "/" + key);
        int k = sc.frame_index(name);
        if (k < 0 || k >= sc.m()) throw SchemaError(p + "/" + key, "expected a tangent frame field");
        return name;
      };
      c.x = field("X");
      c.y = field("Y");
      c.component = field("component");
      if (cl[i].contains("printed"))
        c.printed = parse_at(expr_text(cl[i]["printed"], p + "/printed"), sc.coords, consts, p + "/printed");
      if (cl[i].contains("derived"))
        c.derived = parse_at(expr_text(cl[i]["derived"], p + "/derived"), sc.coords, consts, p + "/derived");
      if (cl[i].contains("parallel")) {
        c.parallel = get_strings(cl[i]["parallel"], p + "/parallel");
        for (std::size_t k = 0; k < c.parallel.size(); ++k) {
          int f = sc.frame_index(c.parallel[k]);
          if (f < 0 || f >= sc.m()) throw SchemaError(child(p + "/parallel", k), "expected a tangent frame field");
        }
      }
      if (cl[i].contains("remark")) c.remark = get_string(cl[i]["remark"], p + "/remark");
      doc.claims.push_back(std::move(c));
    }
  }

  if (root.contains("notes")) {
    const json& nt = root["notes"];
    if (!nt.is_array()) throw SchemaError("/notes", "expected an array");
    for (std::size_t i = 0; i < nt.size(); ++i) {
      std::string p = child("/notes", i);
      only_keys(nt[i], {"id", "text"}, p);
      doc.notes.push_back({get_string(require(nt[i], "id", p), p + "/id"),
                           get_string(require(nt[i], "text", p), p + "/text")});
    }
  }
  return doc;
}

ScenarioDocument load_scenario(const std::string& spec) {
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    std::string name = spec.substr(prefix.size());
    return parse_scenario(builtin_text(name), spec);
  }
  std::ifstream in(spec);
  if (!in) throw SchemaError("/", "cannot read scenario file '" + spec + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), spec);
}

void set_param(ScenarioDocument& doc, const std::string& name, double value) {
  auto it = doc.sc.bindings.find(name);
  if (it == doc.sc.bindings.end()) throw SchemaError("/params/" + name, "unknown parameter");
  it->second = value;
}

void apply_mutation(ScenarioDocument& doc, const std::string& spec) {
  SubmanifoldScenario& sc = doc.sc;
  auto bad = [&](const std::string& why) { return SchemaError("/", "mutation '" + spec + "': " + why); };
  auto c1 = spec.find(':');
  auto c2 = spec.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) throw bad("expected KIND:TARGET:DELTA");
  std::string kind = spec.substr(0, c1);
  std::string target = spec.substr(c1 + 1, c2 - c1 - 1);
  std::string delta = spec.substr(c2 + 1);
  auto comma = target.find(',');
  if (comma == std::string::npos) throw bad("target needs two comma-separated parts");
  std::string first = target.substr(0, comma), second = target.substr(comma + 1);
  auto to_index = [&](const std::string& s) {
    std::size_t used = 0;
    int v = -1;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw bad("'" + s + "' is not an index");
    }
    if (used != s.size() || v < 0 || v >= sc.n()) throw bad("index '" + s + "' out of range");
    return static_cast<std::size_t>(v);
  };
  std::vector<std::string> consts;
  for (const auto& [k, v] : sc.bindings) consts.push_back(k);
  auto bump = [&](Expression& e) {
    e = parse_at("(" + e.render() + ")+(" + delta + ")", sc.coords, consts, "/mutation");
  };
  const std::size_t n = static_cast<std::size_t>(sc.n());
  if (kind == "phi") {
    if (!sc.structure) throw bad("scenario has no structure");
    bump(sc.structure->phi[to_index(first) * n + to_index(second)]);
  } else if (kind == "metric") {
    std::size_t i = to_index(first), j = to_index(second);
    bump(sc.metric.components[i * n + j]);
    if (i != j) bump(sc.metric.components[j * n + i]);
  } else if (kind == "frame") {
    NamedField* f = nullptr;
    for (auto* group : {&sc.rad, &sc.screen, &sc.ltr, &sc.stransversal})
      for (auto& nf : *group)
        if (nf.name == first) f = &nf;
    if (!f) throw bad("unknown frame field '" + first + "'");
    bump(f->field.components[to_index(second)]);
  } else {
    throw bad("kind must be phi, metric or frame");
  }
}

}  // namespace nullgeo
