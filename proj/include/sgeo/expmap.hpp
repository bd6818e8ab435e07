#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgeo/geodesics.hpp"

namespace sgeo {

// Tangent vector at a body point; odd slots carry odd values over L.
struct TangentFiberPoint {
  std::vector<double> base;  // even coordinates
  int L = 0;
  std::vector<Grassmann> vector;
};

InitialCondition to_initial_condition(const MetricChart& m, const TangentFiberPoint& v);

// Position at t = 1 of the geodesic through (q, 0) with velocity v.
SuperPoint exp_at(const MetricChart& m, const TangentFiberPoint& v, double dt);

// Signature of the tangent chart: even block (x.., v_x..), odd block (th.., v_th..).
ChartSignature tangent_signature(const ChartSignature& sig);

// (T Phi)*(q_j) = Phi*(q_j), (T Phi)*(v_j) = sum_i v_i d_{q_i} Phi*(q_j).
SuperMorphism tangent_map(const SuperMorphism& phi);

// J(j, i) = beta(d_{q_i} Phi*(q_j))(q); q lists the source even coordinates.
Eigen::MatrixXd numerical_tangent_map(const SuperMorphism& phi, std::span<const double> q);

struct JacobianReport {
  Eigen::MatrixXd jacobian;
  double deviation = 0.0;      // max |J - I|
  double odd_deviation = 0.0;  // same, odd-odd block only
};

// Linearizes v -> exp_q(v) at v = 0. Even directions: central differences of
// step h on the body output. Odd directions: L = 1, v = theta on one slot, and
// the theta coefficient of every odd output.
JacobianReport exp_jacobian_check(const MetricChart& m, std::span<const double> q, double h, double dt);

struct CheckReport {
  bool pass = false;
  double deviation = 0.0;
  std::string message;
};

// g^M_ij = sum_{k,l} (-1)^{|k|(|j|+|l|)} d_i Phi*(q_k) d_j Phi*(q_l) Phi*(g^N_kl)
// at each sample. Report-valued: evaluation failures are reported, not thrown.
CheckReport isometry_check(const MetricChart& src, const MetricChart& dst, const SuperMorphism& phi,
                           std::span<const SuperPoint> samples, double tol);

// Phi(exp_q(v)) against exp_{Phi~(q)}(T_q Phi v), for each v based at q.
double naturality_deviation(const MetricChart& m, const SuperMorphism& phi, std::span<const TangentFiberPoint> vectors,
                            double dt);
CheckReport naturality_check(const MetricChart& m, const SuperMorphism& phi,
                             std::span<const TangentFiberPoint> vectors, double dt, double tol);

enum class LinearizationStatus { passed, failed, not_isometry, hypotheses_not_met };
const char* to_string(LinearizationStatus s) noexcept;

struct LinearizationReport {
  LinearizationStatus status = LinearizationStatus::failed;
  double deviation = 0.0;
  std::string message;
};

// Gates: isometry_check on `samples`, then Phi~(q) = q and T_q Phi = sign * id.
// Only then compares Phi(exp_q(v)) with exp_q(sign * v). sign = -1 is the
// geodesic-symmetry variant.
LinearizationReport linearization_test(const MetricChart& m, const SuperMorphism& phi,
                                       std::span<const SuperPoint> samples,
                                       std::span<const TangentFiberPoint> vectors, double dt, double tol,
                                       int sign = 1);

}  // namespace sgeo
