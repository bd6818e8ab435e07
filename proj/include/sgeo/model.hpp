#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "sgeo/expmap.hpp"

namespace sgeo {

struct Tolerances {
  double identity = 1e-10;       // graded symmetry, parity, inverse
  double compatibility = 1e-8;   // metric compatibility of Gamma
  double residual = 1e-6;        // nabla/dt of the velocity along a geodesic
  double conservation = 1e-8;    // speed and energy drift
  double body = 1e-8;            // body vs classical integrator
  double roundtrip = 1e-6;       // geodesic vs cotangent flow
  double jacobian = 1e-5;        // T_0 exp_q vs identity
  double jacobian_odd = 1e-9;    // odd-odd block of the same
  double naturality = 1e-6;      // isometries commuting with exp
  double negative = 1e-3;        // negative controls must exceed this

  // Throws ModelError for an unknown key.
  void set(const std::string& key, double value);
};

struct NamedInitialCondition {
  std::string name;
  InitialCondition ic;
};

enum class MorphismRole { isometry, non_isometry, linearization };

struct NamedMorphism {
  std::string name;
  MorphismRole role = MorphismRole::isometry;
  SuperMorphism phi;
  std::vector<std::vector<double>> bases;  // body points for naturality / linearization
  int sign = 1;                            // linearization: T_q Phi = sign * id
  std::string expect = "passed";           // linearization outcome
  bool breaks_naturality = false;          // non_isometry: naturality must fail too
};

struct Model {
  int schema_version = 1;
  std::string name;
  MetricChart metric;
  int L = 0;
  std::vector<NamedInitialCondition> initial_conditions = {};
  std::vector<NamedMorphism> morphisms = {};
  std::vector<std::vector<double>> body_grid = {};  // exp Jacobian sample points
  double dt = 1e-3;
  double t_end = 1.0;
  double vector_scale = 0.3;  // size of generated test vectors
  Tolerances tol = {};

  const NamedInitialCondition& initial_condition(const std::string& name) const;
};

inline constexpr int kSchemaVersion = 1;

// Every failure is reported as ModelError with the offending field in the message.
Model parse_model(const nlohmann::json& j);
Model load_model(const std::filesystem::path& path);

}  // namespace sgeo
