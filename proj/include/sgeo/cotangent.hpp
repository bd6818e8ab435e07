#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgeo/geodesics.hpp"

namespace sgeo {

// (q_i, p_i) on the cotangent chart; |p_i| = |q_i|.
struct PhasePoint {
  SuperPoint position;
  std::vector<Grassmann> momenta;
};

// Throws InvalidPoint / ParityViolation.
void validate_phase_point(const MetricChart& m, const PhasePoint& s);

// H = 1/2 sum_{i,j} p_i g^{ij} p_j
Grassmann energy_at(const MetricChart& m, const PhasePoint& s);

// d_{q_l}(g^{ab}) at p for every l, from d(g^{-1}) = -g^{-1} (dg) g^{-1}:
//   d_l g^{am} = - sum_{k,j} (-1)^{|l|(|a|+|k|)} g^{ak} (d_l g_kj) g^{jm}
std::vector<SuperMatrix> inverse_metric_partials(const MetricChart& m, const SuperPoint& p, const SuperMatrix& inverse);

struct PhaseVelocity {
  std::vector<Grassmann> dq;
  std::vector<Grassmann> dp;
};

// X_H(q_i) = sum_j p_j g^{ji}
// X_H(p_i) = -1/2 sum_{k,j} (-1)^{|q_i||q_k|} p_k d_{q_i}(g^{kj}) p_j
PhaseVelocity xh_at(const MetricChart& m, const PhasePoint& s);

struct FlowSample {
  double t = 0.0;
  std::vector<Grassmann> position;
  std::vector<Grassmann> momenta;
  Grassmann energy;
};

struct FlowState {
  std::vector<FlowSample> samples;
  double dt = 0.0;
  std::string metric_id;
  int L = 0;
  PhasePoint initial;

  PhasePoint point(std::size_t i) const { return {SuperPoint{L, samples[i].position}, samples[i].momenta}; }
};

// RK4 on the expanded real system. Throws LeftDomain, SingularBody.
FlowState integrate_flow(const MetricChart& m, const PhasePoint& initial, double t_end, double dt);

// p_j = sum_i v_i g_ij
std::vector<Grassmann> flat_map(const MetricChart& m, const SuperPoint& p, std::span<const Grassmann> v);
// v_i = sum_j p_j g^{ji}
std::vector<Grassmann> sharp_map(const MetricChart& m, const SuperPoint& p, std::span<const Grassmann> momenta);

PhasePoint to_phase_point(const MetricChart& m, const InitialCondition& ic);

struct RoundtripReport {
  double position = 0.0;  // flow positions vs geodesic positions
  double momentum = 0.0;  // flow momenta vs flat of geodesic velocities
  double velocity = 0.0;  // sharp of flow momenta vs geodesic velocities
  double initial = 0.0;   // t = 0 bookkeeping
  double max() const;
};

RoundtripReport roundtrip_check(const MetricChart& m, const InitialCondition& ic, double t_end, double dt);

double energy_drift(const FlowState& flow);

// Exact check: no coefficient on a mask of the wrong parity anywhere in the run.
bool flow_preserves_parity(const MetricChart& m, const FlowState& flow);

// Classical cotangent flow of the body metric: q' = G^{-1} p, p_l' = -1/2 p^T d_l(G^{-1}) p.
BodyTrajectory integrate_body_flow(const BodyMetric& g, std::span<const double> x0, std::span<const double> p0,
                                   double t_end, double dt);

// Largest body deviation of even positions and momenta; velocity slots of
// `body` hold momenta.
double body_flow_deviation(const FlowState& flow, const BodyTrajectory& body);

// Same layout as trajectory_csv with blocks q, p and an H row per sample.
std::string flow_csv(const FlowState& flow, const ChartSignature& sig);

}  // namespace sgeo
