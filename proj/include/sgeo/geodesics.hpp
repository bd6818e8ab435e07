#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgeo/geometry.hpp"

namespace sgeo {

enum class GeodesicMode { paper, goertsches };

const char* to_string(GeodesicMode mode) noexcept;

// Position and velocity data of a curve R^{0|L} -> TN at t = 0. Velocities
// carry the parity of their coordinate.
struct InitialCondition {
  int L = 0;
  SuperPoint position;
  std::vector<Grassmann> velocity;
};

// Throws InvalidPoint / ParityViolation.
void validate_initial_condition(const MetricChart& m, const InitialCondition& ic);

struct TrajectorySample {
  double t = 0.0;
  std::vector<Grassmann> position;
  std::vector<Grassmann> velocity;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  double dt = 0.0;
  GeodesicMode mode = GeodesicMode::paper;
  std::string metric_id;
  int L = 0;

  SuperPoint point(std::size_t i) const { return SuperPoint{L, samples[i].position}; }
};

// a_k = - sum_{i,j} v_i v_j Gamma^k_{ji}(pos)
std::vector<Grassmann> geodesic_rhs(const MetricChart& m, const SuperPoint& pos, std::span<const Grassmann> vel);

// RK4 over all Grassmann coefficients of (q, dq/dt). Throws LeftDomain when a
// stage leaves the chart box, SingularBody if the metric degenerates.
Trajectory integrate_geodesic(const MetricChart& m, const InitialCondition& ic, double t_end, double dt);

// Mixed system: even coordinates second order with even-even Christoffels,
// odd coordinates first order,
//   f_k''  + sum_{i,j even} f_i' f_j' Gamma^k_{ji} = 0,
//   f_d'   + sum_{i even, b odd} f_b f_i' Gamma^d_{ib} = 0.
// Only the odd position data of `ic` is used; odd velocities in the result are
// the computed first derivatives.
Trajectory integrate_goertsches(const MetricChart& m, const InitialCondition& ic, double t_end, double dt);

using FieldSeries = std::vector<std::vector<Grassmann>>;

// Components of nabla/dt X = sum_k [d_t X_k + sum_{i,j} X_i v_j Gamma^k_{ji}] d_k
// along a sampled curve. d_t uses 4th-order central differences in the
// interior and 4th-order one-sided 5-point stencils at the two points at each end.
// Throws GridTooShort for fewer than 5 samples.
FieldSeries covariant_derivative_t(const MetricChart& m, const Trajectory& path, const FieldSeries& field);

// nabla/dtheta X = sum_k [d_th X_k + sum_{i,j} (-1)^{|X|+|i|} X_i d_th(q_j) Gamma^k_{ji}] d_k
// pointwise, with d_th the left derivative by generator `generator` of Lambda_L.
// Throws NonHomogeneousField when X has no consistent parity.
FieldSeries covariant_derivative_theta(const MetricChart& m, const Trajectory& path, const FieldSeries& field,
                                       int generator);

// Largest coefficient of nabla/dt of the velocity field over the grid.
double geodesic_residual(const MetricChart& m, const Trajectory& path);

// g(v, v) = sum_{i,j} v_i v_j g_ji
Grassmann speed_at(const MetricChart& m, const SuperPoint& pos, std::span<const Grassmann> vel);

// Largest coefficient change of g(v, v) relative to t = 0.
double speed_drift(const MetricChart& m, const Trajectory& path);

// Classical geodesic on the body metric, same RK4 grid.
struct BodyTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> position;
  std::vector<std::vector<double>> velocity;
};

BodyTrajectory integrate_body_geodesic(const BodyMetric& g, std::span<const double> x0, std::span<const double> v0,
                                       double t_end, double dt);

// Largest |body(q_k(t)) - x_k(t)| and velocity difference over the even coordinates.
double body_deviation(const Trajectory& super, const BodyTrajectory& body);

// CSV: t,block,coord,mask,value with block in {q, v}. The mask is an L-character
// bit string, character j standing for generator j+1 ("-" when L = 0). Only
// masks matching the coordinate's parity are written.
std::string trajectory_csv(const Trajectory& traj, const ChartSignature& sig);

std::string mask_string(Grassmann::Mask mask, int L);
std::string format_double(double v);

}  // namespace sgeo
