#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "sgeo/batch.hpp"
#include "sgeo/model.hpp"

namespace sgeo {

enum class Suite { all, metric, geodesic, flow, exp, isometry };

// Throws InvalidArgument for an unknown name.
Suite parse_suite(const std::string& name);
const char* to_string(Suite s) noexcept;

struct CheckItem {
  std::string name;
  double max_deviation = 0.0;  // non-finite when the check could not run
  double tolerance = 0.0;
  bool pass = false;
  bool must_exceed = false;  // negative controls pass when the deviation is above tolerance
  std::string detail;
};

struct VerifyReport {
  std::string model;
  Suite suite = Suite::all;
  std::vector<CheckItem> items;
  bool pass() const;
};

// Items are independent and may run on several threads; their order in the
// report is fixed by the model.
VerifyReport run_verify(const Model& model, Suite suite, Execution ex = Execution::parallel);

nlohmann::json to_json(const VerifyReport& r);

// Largest |d_i g_jk - sum_l Gamma^l_ij g_lk
//   - (-1)^{|i||j|} sum_l (-1)^{(|i|+|k|+|l|)|j|} Gamma^l_ik g_jl| at p.
double compatibility_defect(const MetricChart& m, const SuperPoint& p);

// Largest |Gamma^k_ij - (-1)^{|i||j|} Gamma^k_ji| and largest coefficient on
// a mask whose parity differs from |i|+|j|+|k|.
double christoffel_symmetry_defect(const MetricChart& m, const ChristoffelTable& g);
double christoffel_parity_defect(const MetricChart& m, const ChristoffelTable& g);

// Deterministic parity-correct tangent vectors at a body point.
std::vector<TangentFiberPoint> random_vectors(const MetricChart& m, const std::vector<double>& base, int L, int count,
                                              std::uint64_t seed, double scale);

}  // namespace sgeo
