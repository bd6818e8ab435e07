#include "sgeo/cotangent.hpp"

#include <algorithm>
#include <cmath>

#include "sgeo/error.hpp"
#include "sgeo/rk4.hpp"

namespace sgeo {

namespace {

double sign_of(int parity_sum) { return (parity_sum & 1) ? -1.0 : 1.0; }

void check_momenta(const ChartSignature& sig, std::span<const Grassmann> momenta, int L) {
  if (static_cast<int>(momenta.size()) != sig.size())
    throw Error(ErrorCode::InvalidPoint, "need one momentum per coordinate");
  for (int i = 0; i < sig.size(); ++i) {
    const Grassmann& p = momenta[static_cast<std::size_t>(i)];
    if (p.generators() != L) throw Error(ErrorCode::InvalidPoint, "momentum is not over L");
    if (sig.is_odd(i) ? !p.is_odd() : !p.is_even())
      throw Error(ErrorCode::ParityViolation, "momentum of '" + sig.name(i) + "' has the wrong parity");
  }
}

void require_in_domain(const MetricChart& m, std::span<const Grassmann> q, double t) {
  for (int i = 0; i < m.signature().even_count(); ++i) {
    const double x = q[static_cast<std::size_t>(i)].body();
    const auto [lo, hi] = m.domain().bounds[static_cast<std::size_t>(i)];
    if (!(x > lo && x < hi))
      throw Error(ErrorCode::LeftDomain, "coordinate '" + m.signature().name(i) + "' left the chart domain near t=" +
                                             format_double(t));
  }
}

Grassmann energy_with(const SuperMatrix& inv, std::span<const Grassmann> p, int L) {
  const int n = inv.size();
  Grassmann h(L);
  for (int i = 0; i < n; ++i) {
    if (p[i].is_zero()) continue;
    for (int j = 0; j < n; ++j)
      if (!inv(i, j).is_zero() && !p[j].is_zero()) h += p[i] * inv(i, j) * p[j];
  }
  return h * 0.5;
}

}  // namespace

void validate_phase_point(const MetricChart& m, const PhasePoint& s) {
  require_valid_point(m, s.position);
  check_momenta(m.signature(), s.momenta, s.position.L);
}

Grassmann energy_at(const MetricChart& m, const PhasePoint& s) {
  validate_phase_point(m, s);
  return energy_with(metric_inverse_at(m, s.position), s.momenta, s.position.L);
}

std::vector<SuperMatrix> inverse_metric_partials(const MetricChart& m, const SuperPoint& p,
                                                 const SuperMatrix& inv) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  const int L = p.L;
  std::vector<SuperMatrix> out(static_cast<std::size_t>(n), SuperMatrix(n, L));
  if (m.is_constant()) return out;
  for (int l = 0; l < n; ++l) {
    SuperMatrix d(n, L);
    bool any = false;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        const Expr& e = m.entry_partial(l, k, j);
        if (e.is_zero()) continue;
        d(k, j) = evaluate(e, p.values, L);
        any = true;
      }
    if (!any) continue;
    const SuperMatrix dinv = d * inv;  // (d_l g) g^{-1}
    SuperMatrix& r = out[static_cast<std::size_t>(l)];
    for (int a = 0; a < n; ++a)
      for (int k = 0; k < n; ++k) {
        if (inv(a, k).is_zero()) continue;
        const double s = -sign_of(sig.parity_bit(l) * (sig.parity_bit(a) + sig.parity_bit(k)));
        for (int mm = 0; mm < n; ++mm)
          if (!dinv(k, mm).is_zero()) r(a, mm).axpy(s, inv(a, k) * dinv(k, mm));
      }
  }
  return out;
}

namespace {

PhaseVelocity xh_unchecked(const MetricChart& m, const SuperPoint& q, std::span<const Grassmann> p) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  const int L = q.L;
  const SuperMatrix inv = metric_inverse_at(m, q);
  PhaseVelocity out{std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(L)),
                    std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(L))};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!p[j].is_zero() && !inv(j, i).is_zero()) out.dq[i] += p[j] * inv(j, i);
  if (m.is_constant()) return out;
  const auto dinv = inverse_metric_partials(m, q, inv);
  for (int i = 0; i < n; ++i) {
    const SuperMatrix& di = dinv[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k) {
      if (p[k].is_zero()) continue;
      const double s = -0.5 * sign_of(sig.parity_bit(i) * sig.parity_bit(k));
      for (int j = 0; j < n; ++j)
        if (!di(k, j).is_zero() && !p[j].is_zero()) out.dp[i].axpy(s, p[k] * di(k, j) * p[j]);
    }
  }
  return out;
}

}  // namespace

PhaseVelocity xh_at(const MetricChart& m, const PhasePoint& s) {
  validate_phase_point(m, s);
  return xh_unchecked(m, s.position, s.momenta);
}

FlowState integrate_flow(const MetricChart& m, const PhasePoint& initial, double t_end, double dt) {
  validate_phase_point(m, initial);
  const StepGrid grid(t_end, dt);
  const auto n = static_cast<std::size_t>(m.dim());
  const int L = initial.position.L;

  std::vector<Grassmann> y = initial.position.values;
  y.insert(y.end(), initial.momenta.begin(), initial.momenta.end());

  double t_stage = 0.0;
  auto rhs = [&](const std::vector<Grassmann>& s) {
    const std::span<const Grassmann> q(s.data(), n), p(s.data() + n, n);
    require_in_domain(m, q, t_stage);
    PhaseVelocity x = xh_unchecked(m, SuperPoint{L, {q.begin(), q.end()}}, p);
    x.dq.insert(x.dq.end(), x.dp.begin(), x.dp.end());
    return x.dq;
  };
  auto sample = [&](double t) {
    FlowSample s{t, {y.begin(), y.begin() + static_cast<long>(n)}, {y.begin() + static_cast<long>(n), y.end()}, {}};
    s.energy = energy_with(metric_inverse_at(m, SuperPoint{L, s.position}), s.momenta, L);
    return s;
  };

  FlowState flow;
  flow.dt = grid.h;
  flow.metric_id = m.id();
  flow.L = L;
  flow.initial = initial;
  flow.samples.reserve(static_cast<std::size_t>(grid.steps) + 1);
  flow.samples.push_back(sample(0.0));
  for (long s = 0; s < grid.steps; ++s) {
    t_stage = grid.time(s);
    y = rk4_step(rhs, y, grid.h);
    require_in_domain(m, std::span<const Grassmann>(y.data(), n), grid.time(s + 1));
    flow.samples.push_back(sample(grid.time(s + 1)));
  }
  return flow;
}

std::vector<Grassmann> flat_map(const MetricChart& m, const SuperPoint& p, std::span<const Grassmann> v) {
  require_valid_point(m, p);
  const SuperMatrix g = metric_at(m, p);
  const int n = m.dim();
  std::vector<Grassmann> out(static_cast<std::size_t>(n), Grassmann(p.L));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (!v[i].is_zero() && !g(i, j).is_zero()) out[j] += v[i] * g(i, j);
  return out;
}

std::vector<Grassmann> sharp_map(const MetricChart& m, const SuperPoint& p, std::span<const Grassmann> momenta) {
  const SuperMatrix inv = metric_inverse_at(m, p);
  const int n = m.dim();
  std::vector<Grassmann> out(static_cast<std::size_t>(n), Grassmann(p.L));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!momenta[j].is_zero() && !inv(j, i).is_zero()) out[i] += momenta[j] * inv(j, i);
  return out;
}

PhasePoint to_phase_point(const MetricChart& m, const InitialCondition& ic) {
  validate_initial_condition(m, ic);
  return {ic.position, flat_map(m, ic.position, ic.velocity)};
}

double RoundtripReport::max() const { return std::max({position, momentum, velocity, initial}); }

RoundtripReport roundtrip_check(const MetricChart& m, const InitialCondition& ic, double t_end, double dt) {
  const Trajectory geo = integrate_geodesic(m, ic, t_end, dt);
  const PhasePoint start = to_phase_point(m, ic);
  const FlowState flow = integrate_flow(m, start, t_end, dt);
  RoundtripReport r;
  const int n = m.dim();
  for (std::size_t s = 0; s < geo.samples.size(); ++s) {
    const auto& gs = geo.samples[s];
    const auto& fs = flow.samples[s];
    const SuperPoint at = geo.point(s);
    const auto p_from_v = flat_map(m, at, gs.velocity);
    const auto v_from_p = sharp_map(m, flow.point(s).position, fs.momenta);
    for (int k = 0; k < n; ++k) {
      r.position = std::max(r.position, max_abs_diff(gs.position[k], fs.position[k]));
      r.momentum = std::max(r.momentum, max_abs_diff(p_from_v[k], fs.momenta[k]));
      r.velocity = std::max(r.velocity, max_abs_diff(v_from_p[k], gs.velocity[k]));
    }
  }
  // At t = 0 the flow velocity must be exactly the initial velocity.
  const auto v0 = sharp_map(m, start.position, start.momenta);
  for (int k = 0; k < n; ++k) r.initial = std::max(r.initial, max_abs_diff(v0[k], ic.velocity[k]));
  return r;
}

double energy_drift(const FlowState& flow) {
  double worst = 0.0;
  for (const auto& s : flow.samples)
    worst = std::max(worst, max_abs_diff(s.energy, flow.samples.front().energy));
  return worst;
}

bool flow_preserves_parity(const MetricChart& m, const FlowState& flow) {
  const ChartSignature& sig = m.signature();
  bool ok = true;
  auto check = [&](const Grassmann& g, bool odd) {
    g.for_each_term([&](Grassmann::Mask mask, double) {
      if (mask_is_odd(mask) != odd) ok = false;
    });
  };
  for (const auto& s : flow.samples) {
    for (int i = 0; i < sig.size(); ++i) {
      check(s.position[i], sig.is_odd(i));
      check(s.momenta[i], sig.is_odd(i));
    }
    check(s.energy, false);
  }
  return ok;
}

BodyTrajectory integrate_body_flow(const BodyMetric& g, std::span<const double> x0, std::span<const double> p0,
                                   double t_end, double dt) {
  const StepGrid grid(t_end, dt);
  const int n = g.dim();
  std::vector<double> y(x0.begin(), x0.end());
  y.insert(y.end(), p0.begin(), p0.end());
  auto rhs = [&](const std::vector<double>& s) {
    const std::span<const double> x(s.data(), static_cast<std::size_t>(n));
    const Eigen::Map<const Eigen::VectorXd> p(s.data() + n, n);
    const Eigen::MatrixXd ginv = g.metric(x).inverse();
    const auto dg = g.metric_partials(x);
    const Eigen::VectorXd u = ginv * p;
    std::vector<double> out(static_cast<std::size_t>(2 * n));
    for (int k = 0; k < n; ++k) {
      out[k] = u(k);
      // d_k(G^{-1}) = -G^{-1} d_k G G^{-1}
      out[n + k] = 0.5 * u.dot(dg[k] * u);
    }
    return out;
  };
  BodyTrajectory out;
  auto push = [&](double t) {
    out.t.push_back(t);
    out.position.emplace_back(y.begin(), y.begin() + n);
    out.velocity.emplace_back(y.begin() + n, y.end());
  };
  push(0.0);
  for (long s = 0; s < grid.steps; ++s) {
    y = rk4_step(rhs, y, grid.h);
    push(grid.time(s + 1));
  }
  return out;
}

double body_flow_deviation(const FlowState& flow, const BodyTrajectory& body) {
  if (flow.samples.size() != body.t.size())
    throw Error(ErrorCode::InvalidArgument, "trajectories have different grids");
  double worst = 0.0;
  for (std::size_t s = 0; s < body.t.size(); ++s)
    for (std::size_t k = 0; k < body.position[s].size(); ++k) {
      worst = std::max(worst, std::abs(flow.samples[s].position[k].body() - body.position[s][k]));
      worst = std::max(worst, std::abs(flow.samples[s].momenta[k].body() - body.velocity[s][k]));
    }
  return worst;
}

std::string flow_csv(const FlowState& flow, const ChartSignature& sig) {
  std::string out = "t,block,coord,mask,value\n";
  const Grassmann::Mask size = Grassmann::Mask{1} << flow.L;
  auto row = [&](const std::string& t, const char* block, const std::string& coord, Grassmann::Mask mask,
                 double v) {
    out += t + ',' + block + ',' + coord + ',' + mask_string(mask, flow.L) + ',' + format_double(v) + '\n';
  };
  for (const auto& s : flow.samples) {
    const std::string t = format_double(s.t);
    for (const auto& [block, values] : {std::pair{"q", &s.position}, std::pair{"p", &s.momenta}})
      for (int i = 0; i < sig.size(); ++i)
        for (Grassmann::Mask mask = 0; mask < size; ++mask)
          if (mask_is_odd(mask) == sig.is_odd(i)) row(t, block, sig.name(i), mask, (*values)[i].coeff(mask));
    for (Grassmann::Mask mask = 0; mask < size; ++mask)
      if (!mask_is_odd(mask)) row(t, "H", "H", mask, s.energy.coeff(mask));
  }
  return out;
}

}  // namespace sgeo
