#include "sgeo/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "sgeo/error.hpp"

namespace sgeo {

using nlohmann::json;

void Tolerances::set(const std::string& key, double value) {
  double* slot = nullptr;
  if (key == "identity") slot = &identity;
  else if (key == "compatibility") slot = &compatibility;
  else if (key == "residual") slot = &residual;
  else if (key == "conservation") slot = &conservation;
  else if (key == "body") slot = &body;
  else if (key == "roundtrip") slot = &roundtrip;
  else if (key == "jacobian") slot = &jacobian;
  else if (key == "jacobian_odd") slot = &jacobian_odd;
  else if (key == "naturality") slot = &naturality;
  else if (key == "negative") slot = &negative;
  if (!slot) throw Error(ErrorCode::ModelError, "unknown tolerance '" + key + "'");
  if (!(value > 0.0)) throw Error(ErrorCode::ModelError, "tolerance '" + key + "' must be positive");
  *slot = value;
}

const NamedInitialCondition& Model::initial_condition(const std::string& wanted) const {
  for (const auto& ic : initial_conditions)
    if (ic.name == wanted) return ic;
  throw Error(ErrorCode::ModelError, "model has no initial condition '" + wanted + "'");
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ModelError, where + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(where, std::string("missing '") + key + "'");
  return j.at(key);
}

std::vector<std::string> names(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of names");
  std::vector<std::string> out;
  for (const auto& n : j) {
    if (!n.is_string()) fail(where, "names must be strings");
    out.push_back(n.get<std::string>());
  }
  return out;
}

double bound(const json& j, double fallback, const std::string& where) {
  if (j.is_null()) return fallback;
  if (!j.is_number()) fail(where, "bound must be a number or null");
  return j.get<double>();
}

std::vector<double> body_vector(const json& j, int size, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != size)
    fail(where, "expected " + std::to_string(size) + " even coordinate values");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) fail(where, "coordinate values must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::vector<double>> body_list(const json& j, int size, const std::string& where) {
  if (!j.is_array()) fail(where, "expected a list of body points");
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(body_vector(j[i], size, where + "[" + std::to_string(i) + "]"));
  return out;
}

// Per-coordinate Grassmann data keyed by name; absent coordinates are zero.
std::vector<Grassmann> coordinate_values(const json& j, const ChartSignature& sig, int L, const std::string& where) {
  std::vector<Grassmann> out(static_cast<std::size_t>(sig.size()), Grassmann(L));
  if (j.is_null()) return out;
  if (!j.is_object()) fail(where, "expected an object keyed by coordinate name");
  for (const auto& [key, value] : j.items()) {
    const auto idx = sig.find(key);
    if (!idx) fail(where, "unknown coordinate '" + key + "'");
    out[static_cast<std::size_t>(*idx)] = grassmann_from_json(value, L);
  }
  return out;
}

DomainBox parse_domain(const json& j, const ChartSignature& sig) {
  DomainBox box = DomainBox::unbounded(sig.even_count());
  if (j.is_null()) return box;
  if (!j.is_object()) fail("domain", "expected an object keyed by even coordinate name");
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& [key, value] : j.items()) {
    const auto idx = sig.find(key);
    if (!idx || sig.is_odd(*idx)) fail("domain", "'" + key + "' is not an even coordinate");
    if (!value.is_array() || value.size() != 2) fail("domain." + key, "expected [lo, hi]");
    const double lo = bound(value[0], -inf, "domain." + key), hi = bound(value[1], inf, "domain." + key);
    if (!(lo < hi)) fail("domain." + key, "empty interval");
    box.bounds[static_cast<std::size_t>(*idx)] = {lo, hi};
  }
  return box;
}

std::vector<std::vector<double>> default_grid(const DomainBox& box) {
  std::vector<std::vector<double>> grid;
  for (int s = 0; s < 5; ++s) {
    std::vector<double> p;
    for (auto [lo, hi] : box.bounds) {
      if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 2.0 : -1.0;
      if (!std::isfinite(hi)) hi = lo + 2.0;
      p.push_back(lo + (0.25 + 0.125 * s) * (hi - lo));
    }
    grid.push_back(std::move(p));
  }
  return grid;
}

MetricChart parse_metric(const json& j) {
  const json& sj = need(j, "signature", "model");
  ChartSignature sig(names(need(sj, "even", "signature"), "signature.even"),
                     names(need(sj, "odd", "signature"), "signature.odd"));
  const json& mj = need(j, "metric", "model");
  const auto n = static_cast<std::size_t>(sig.size());
  if (!mj.is_array() || mj.size() != n) fail("metric", "expected " + std::to_string(n) + " rows");
  std::vector<Expr> entries;
  for (std::size_t r = 0; r < n; ++r) {
    if (!mj[r].is_array() || mj[r].size() != n) fail("metric", "row " + std::to_string(r) + " has the wrong length");
    for (std::size_t c = 0; c < n; ++c) {
      const json& e = mj[r][c];
      const std::string where = "metric[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      if (e.is_number()) entries.push_back(Expr::constant(e.get<double>()));
      else if (e.is_string()) entries.push_back(parse_expr(e.get<std::string>(), sig));
      else fail(where, "entry must be an expression string or number");
    }
  }
  DomainBox box = parse_domain(j.value("domain", json()), sig);
  return MetricChart(sig, std::move(entries), std::move(box), j.value("name", std::string()));
}

MorphismRole parse_role(const std::string& s, const std::string& where) {
  if (s == "isometry") return MorphismRole::isometry;
  if (s == "non_isometry") return MorphismRole::non_isometry;
  if (s == "linearization") return MorphismRole::linearization;
  fail(where, "unknown role '" + s + "'");
}

}  // namespace

Model parse_model(const json& j) {
  try {
    if (!j.is_object()) fail("model", "top level must be an object");
    const int version = need(j, "schema_version", "model").get<int>();
    if (version != kSchemaVersion)
      fail("schema_version", "unsupported version " + std::to_string(version));
    Model model{.schema_version = version, .name = j.value("name", std::string()), .metric = parse_metric(j)};
    const ChartSignature& sig = model.metric.signature();
    model.L = j.value("L", 2);
    if (model.L < 0 || model.L > Grassmann::kMaxGenerators) fail("L", "out of range");

    if (j.contains("defaults")) {
      const json& d = j.at("defaults");
      model.dt = d.value("dt", model.dt);
      model.t_end = d.value("t_end", model.t_end);
      model.vector_scale = d.value("vector_scale", model.vector_scale);
    }
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      if (!t.is_object()) fail("tolerances", "expected an object");
      for (const auto& [key, value] : t.items()) model.tol.set(key, value.get<double>());
    }

    if (j.contains("initial_conditions")) {
      const json& list = j.at("initial_conditions");
      if (!list.is_array()) fail("initial_conditions", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const json& e = list[i];
        const std::string where = "initial_conditions[" + std::to_string(i) + "]";
        NamedInitialCondition nic;
        nic.name = need(e, "name", where).get<std::string>();
        const int L = e.value("L", model.L);
        if (L < 0 || L > Grassmann::kMaxGenerators) fail(where, "L out of range");
        nic.ic.L = L;
        nic.ic.position = SuperPoint{L, coordinate_values(e.value("position", json()), sig, L, where + ".position")};
        nic.ic.velocity = coordinate_values(e.value("velocity", json()), sig, L, where + ".velocity");
        try {
          validate_initial_condition(model.metric, nic.ic);
        } catch (const Error& err) {
          fail(where + " '" + nic.name + "'", err.what());
        }
        model.initial_conditions.push_back(std::move(nic));
      }
    }

    if (j.contains("morphisms")) {
      const json& list = j.at("morphisms");
      if (!list.is_array()) fail("morphisms", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const json& e = list[i];
        const std::string where = "morphisms[" + std::to_string(i) + "]";
        NamedMorphism nm;
        nm.name = need(e, "name", where).get<std::string>();
        nm.role = parse_role(e.value("role", std::string("isometry")), where);
        const json& pj = need(e, "pullbacks", where);
        std::vector<Expr> pull;
        for (int c = 0; c < sig.size(); ++c) {
          if (!pj.contains(sig.name(c))) fail(where, "missing pullback of '" + sig.name(c) + "'");
          pull.push_back(parse_expr(pj.at(sig.name(c)).get<std::string>(), sig));
        }
        if (pj.size() != static_cast<std::size_t>(sig.size())) fail(where, "pullbacks name unknown coordinates");
        nm.phi = make_morphism(sig, sig, std::move(pull));
        if (e.contains("bases")) nm.bases = body_list(e.at("bases"), sig.even_count(), where + ".bases");
        nm.sign = e.value("sign", 1);
        if (nm.sign != 1 && nm.sign != -1) fail(where, "sign must be 1 or -1");
        nm.expect = e.value("expect", std::string("passed"));
        nm.breaks_naturality = e.value("breaks_naturality", false);
        model.morphisms.push_back(std::move(nm));
      }
    }

    model.body_grid = j.contains("body_grid") ? body_list(j.at("body_grid"), sig.even_count(), "body_grid")
                                              : default_grid(model.metric.domain());
    for (auto& m : model.morphisms)
      if (m.bases.empty()) m.bases = model.body_grid;
    return model;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ModelError) throw;
    throw Error(ErrorCode::ModelError, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ModelError, e.what());
  }
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ModelError, "cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ModelError, path.string() + ": " + e.what());
  }
  Model m = parse_model(j);
  if (m.name.empty()) m.name = path.stem().string();
  return m;
}

}  // namespace sgeo
