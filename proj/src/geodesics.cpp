#include "sgeo/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sgeo/error.hpp"
#include "sgeo/rk4.hpp"

namespace sgeo {

const char* to_string(GeodesicMode mode) noexcept {
  return mode == GeodesicMode::paper ? "paper" : "goertsches";
}

void validate_initial_condition(const MetricChart& m, const InitialCondition& ic) {
  const ChartSignature& sig = m.signature();
  if (ic.position.L != ic.L) throw Error(ErrorCode::InvalidPoint, "initial position is not over L");
  require_valid_point(m, ic.position);
  if (static_cast<int>(ic.velocity.size()) != sig.size())
    throw Error(ErrorCode::InvalidPoint, "initial velocity needs one component per coordinate");
  for (int i = 0; i < sig.size(); ++i) {
    const Grassmann& v = ic.velocity[static_cast<std::size_t>(i)];
    if (v.generators() != ic.L) throw Error(ErrorCode::InvalidPoint, "initial velocity is not over L");
    if (sig.is_odd(i) ? !v.is_odd() : !v.is_even())
      throw Error(ErrorCode::ParityViolation, "velocity of '" + sig.name(i) + "' has the wrong parity");
  }
}

namespace {

void require_in_domain(const MetricChart& m, std::span<const Grassmann> q, double t) {
  const int ne = m.signature().even_count();
  for (int i = 0; i < ne; ++i) {
    const double x = q[static_cast<std::size_t>(i)].body();
    const auto [lo, hi] = m.domain().bounds[static_cast<std::size_t>(i)];
    if (!(x > lo && x < hi))
      throw Error(ErrorCode::LeftDomain, "coordinate '" + m.signature().name(i) + "' left the chart domain near t=" +
                                             format_double(t));
  }
}

}  // namespace

std::vector<Grassmann> geodesic_rhs(const MetricChart& m, const SuperPoint& pos, std::span<const Grassmann> vel) {
  const int n = m.dim();
  const int L = pos.L;
  std::vector<Grassmann> a(static_cast<std::size_t>(n), Grassmann(L));
  if (m.is_constant()) {
    require_valid_point(m, pos);
    return a;
  }
  const ChristoffelTable gamma = christoffel_at(m, pos);
  for (int i = 0; i < n; ++i) {
    if (vel[i].is_zero()) continue;
    for (int j = 0; j < n; ++j) {
      if (vel[j].is_zero()) continue;
      const Grassmann w = vel[i] * vel[j];
      if (w.is_zero()) continue;
      for (int k = 0; k < n; ++k)
        if (!gamma.is_zero(k, j, i)) a[k] -= w * gamma(k, j, i);
    }
  }
  return a;
}

Trajectory integrate_geodesic(const MetricChart& m, const InitialCondition& ic, double t_end, double dt) {
  validate_initial_condition(m, ic);
  const StepGrid grid(t_end, dt);
  const auto n = static_cast<std::size_t>(m.dim());
  const int L = ic.L;

  // y = (q_0..q_{n-1}, v_0..v_{n-1})
  std::vector<Grassmann> y = ic.position.values;
  y.insert(y.end(), ic.velocity.begin(), ic.velocity.end());

  double t_stage = 0.0;
  auto rhs = [&](const std::vector<Grassmann>& s) {
    const std::span<const Grassmann> q(s.data(), n), v(s.data() + n, n);
    require_in_domain(m, q, t_stage);
    std::vector<Grassmann> out(v.begin(), v.end());
    const auto a = geodesic_rhs(m, SuperPoint{L, {q.begin(), q.end()}}, v);
    out.insert(out.end(), a.begin(), a.end());
    return out;
  };

  Trajectory traj;
  traj.dt = grid.h;
  traj.mode = GeodesicMode::paper;
  traj.metric_id = m.id();
  traj.L = L;
  traj.samples.reserve(static_cast<std::size_t>(grid.steps) + 1);
  traj.samples.push_back({0.0, {y.begin(), y.begin() + n}, {y.begin() + n, y.end()}});
  for (long s = 0; s < grid.steps; ++s) {
    t_stage = grid.time(s);
    y = rk4_step(rhs, y, grid.h);
    require_in_domain(m, std::span<const Grassmann>(y.data(), n), grid.time(s + 1));
    traj.samples.push_back({grid.time(s + 1), {y.begin(), y.begin() + n}, {y.begin() + n, y.end()}});
  }
  return traj;
}

namespace {

// Returns (dq, dv_even) for the mixed system; state = (q_0..q_{n-1}, v_0..v_{m-1}).
std::vector<Grassmann> goertsches_rhs(const MetricChart& m, std::span<const Grassmann> q,
                                      std::span<const Grassmann> v_even, int L) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  const int ne = sig.even_count();
  std::vector<Grassmann> out(static_cast<std::size_t>(n + ne), Grassmann(L));
  for (int i = 0; i < ne; ++i) out[i] = v_even[i];
  if (m.is_constant()) return out;
  const ChristoffelTable gamma = christoffel_at(m, SuperPoint{L, {q.begin(), q.end()}});
  // Even accelerations.
  for (int i = 0; i < ne; ++i)
    for (int j = 0; j < ne; ++j) {
      const Grassmann w = v_even[i] * v_even[j];
      if (w.is_zero()) continue;
      for (int k = 0; k < ne; ++k)
        if (!gamma.is_zero(k, j, i)) out[n + k] -= w * gamma(k, j, i);
    }
  // Odd first-order equations.
  for (int d = ne; d < n; ++d)
    for (int i = 0; i < ne; ++i)
      for (int b = ne; b < n; ++b) {
        if (gamma.is_zero(d, i, b) || q[b].is_zero() || v_even[i].is_zero()) continue;
        out[d] -= q[b] * v_even[i] * gamma(d, i, b);
      }
  return out;
}

}  // namespace

Trajectory integrate_goertsches(const MetricChart& m, const InitialCondition& ic, double t_end, double dt) {
  validate_initial_condition(m, ic);
  const StepGrid grid(t_end, dt);
  const int n = m.dim();
  const int ne = m.signature().even_count();
  const int L = ic.L;

  std::vector<Grassmann> y = ic.position.values;
  y.insert(y.end(), ic.velocity.begin(), ic.velocity.begin() + ne);

  double t_stage = 0.0;
  auto rhs = [&](const std::vector<Grassmann>& s) {
    const std::span<const Grassmann> q(s.data(), n), v(s.data() + n, ne);
    require_in_domain(m, q, t_stage);
    return goertsches_rhs(m, q, v, L);
  };
  auto sample = [&](double t, const std::vector<Grassmann>& s) {
    const auto d = goertsches_rhs(m, std::span<const Grassmann>(s.data(), n),
                                  std::span<const Grassmann>(s.data() + n, ne), L);
    TrajectorySample out{t, {s.begin(), s.begin() + n}, {}};
    out.velocity.assign(s.begin() + n, s.end());
    out.velocity.insert(out.velocity.end(), d.begin() + ne, d.begin() + n);
    return out;
  };

  Trajectory traj;
  traj.dt = grid.h;
  traj.mode = GeodesicMode::goertsches;
  traj.metric_id = m.id();
  traj.L = L;
  traj.samples.push_back(sample(0.0, y));
  for (long s = 0; s < grid.steps; ++s) {
    t_stage = grid.time(s);
    y = rk4_step(rhs, y, grid.h);
    require_in_domain(m, std::span<const Grassmann>(y.data(), static_cast<std::size_t>(n)), grid.time(s + 1));
    traj.samples.push_back(sample(grid.time(s + 1), y));
  }
  return traj;
}

FieldSeries covariant_derivative_t(const MetricChart& m, const Trajectory& path, const FieldSeries& field) {
  const std::size_t ns = path.samples.size();
  if (ns < 5) throw Error(ErrorCode::GridTooShort, "need at least 5 samples, got " + std::to_string(ns));
  if (field.size() != ns) throw Error(ErrorCode::InvalidArgument, "field and path lengths differ");
  const int n = m.dim();
  const int L = path.L;
  const double h = path.dt;

  FieldSeries out(ns, std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(L)));
  for (std::size_t s = 0; s < ns; ++s) {
    auto& r = out[s];
    for (int k = 0; k < n; ++k) {
      auto f = [&](std::size_t idx) -> const Grassmann& { return field[idx][k]; };
      // 4th order everywhere: centered in the interior, one-sided 5-point
      // stencils on the two samples at each end.
      static constexpr double kEdge0[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};
      static constexpr double kEdge1[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};
      Grassmann d(L);
      if (s >= 2 && s + 2 < ns) {
        d.axpy(-1.0, f(s + 2));
        d.axpy(8.0, f(s + 1));
        d.axpy(-8.0, f(s - 1));
        d.axpy(1.0, f(s - 2));
      } else if (s < 2) {
        const double* w = s == 0 ? kEdge0 : kEdge1;
        for (std::size_t q = 0; q < 5; ++q) d.axpy(w[q], f(q));
      } else {
        // Mirror image of the leading stencils; the odd derivative flips sign.
        const double* w = s + 1 == ns ? kEdge0 : kEdge1;
        for (std::size_t q = 0; q < 5; ++q) d.axpy(-w[q], f(ns - 1 - q));
      }
      d *= 1.0 / (12.0 * h);
      r[k] = std::move(d);
    }
    if (m.is_constant()) continue;
    const ChristoffelTable gamma = christoffel_at(m, path.point(s));
    const auto& x = field[s];
    const auto& v = path.samples[s].velocity;
    for (int i = 0; i < n; ++i) {
      if (x[i].is_zero()) continue;
      for (int j = 0; j < n; ++j) {
        if (v[j].is_zero()) continue;
        const Grassmann w = x[i] * v[j];
        for (int k = 0; k < n; ++k)
          if (!gamma.is_zero(k, j, i)) r[k] += w * gamma(k, j, i);
      }
    }
  }
  return out;
}

FieldSeries covariant_derivative_theta(const MetricChart& m, const Trajectory& path, const FieldSeries& field,
                                       int generator) {
  const ChartSignature& sig = m.signature();
  const std::size_t ns = path.samples.size();
  if (field.size() != ns) throw Error(ErrorCode::InvalidArgument, "field and path lengths differ");
  const int n = m.dim();
  const int L = path.L;

  // |X| from the components: X(q_i) has parity |X| + |q_i|.
  int field_parity = -1;
  for (const auto& x : field)
    for (int i = 0; i < n; ++i) {
      const Parity p = x[i].parity();
      if (x[i].is_zero()) continue;
      if (p == Parity::nonhomogeneous)
        throw Error(ErrorCode::NonHomogeneousField, "component " + sig.name(i) + " has mixed parity");
      const int px = ((p == Parity::odd ? 1 : 0) + sig.parity_bit(i)) & 1;
      if (field_parity >= 0 && px != field_parity)
        throw Error(ErrorCode::NonHomogeneousField, "components disagree on the parity of the field");
      field_parity = px;
    }
  if (field_parity < 0) field_parity = 0;

  FieldSeries out(ns, std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(L)));
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& x = field[s];
    auto& r = out[s];
    for (int k = 0; k < n; ++k) r[k] = x[k].left_derivative(generator);
    if (m.is_constant()) continue;
    const ChristoffelTable gamma = christoffel_at(m, path.point(s));
    std::vector<Grassmann> dq;
    for (const auto& q : path.samples[s].position) dq.push_back(q.left_derivative(generator));
    for (int i = 0; i < n; ++i) {
      if (x[i].is_zero()) continue;
      const double sign = ((field_parity + sig.parity_bit(i)) & 1) ? -1.0 : 1.0;
      for (int j = 0; j < n; ++j) {
        if (dq[j].is_zero()) continue;
        const Grassmann w = x[i] * dq[j];
        for (int k = 0; k < n; ++k)
          if (!gamma.is_zero(k, j, i)) r[k].axpy(sign, w * gamma(k, j, i));
      }
    }
  }
  return out;
}

double geodesic_residual(const MetricChart& m, const Trajectory& path) {
  FieldSeries v;
  v.reserve(path.samples.size());
  for (const auto& s : path.samples) v.push_back(s.velocity);
  const FieldSeries r = covariant_derivative_t(m, path, v);
  double worst = 0.0;
  for (const auto& row : r)
    for (const auto& c : row) worst = std::max(worst, c.max_abs());
  return worst;
}

Grassmann speed_at(const MetricChart& m, const SuperPoint& pos, std::span<const Grassmann> vel) {
  const SuperMatrix g = metric_at(m, pos);
  const int n = m.dim();
  Grassmann s(pos.L);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (g(j, i).is_zero()) continue;
      s += vel[i] * vel[j] * g(j, i);
    }
  return s;
}

double speed_drift(const MetricChart& m, const Trajectory& path) {
  const Grassmann s0 = speed_at(m, path.point(0), path.samples.front().velocity);
  double worst = 0.0;
  for (std::size_t i = 1; i < path.samples.size(); ++i)
    worst = std::max(worst, max_abs_diff(speed_at(m, path.point(i), path.samples[i].velocity), s0));
  return worst;
}

BodyTrajectory integrate_body_geodesic(const BodyMetric& g, std::span<const double> x0, std::span<const double> v0,
                                       double t_end, double dt) {
  const StepGrid grid(t_end, dt);
  const auto n = static_cast<std::size_t>(g.dim());
  std::vector<double> y(x0.begin(), x0.end());
  y.insert(y.end(), v0.begin(), v0.end());
  auto rhs = [&](const std::vector<double>& s) {
    const std::span<const double> x(s.data(), n);
    const auto gamma = g.christoffel(x);
    std::vector<double> out(2 * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = s[n + k];
      double a = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a += s[n + i] * s[n + j] * gamma[(k * n + j) * n + i];
      out[n + k] = -a;
    }
    return out;
  };
  BodyTrajectory out;
  auto push = [&](double t) {
    out.t.push_back(t);
    out.position.emplace_back(y.begin(), y.begin() + static_cast<long>(n));
    out.velocity.emplace_back(y.begin() + static_cast<long>(n), y.end());
  };
  push(0.0);
  for (long s = 0; s < grid.steps; ++s) {
    y = rk4_step(rhs, y, grid.h);
    push(grid.time(s + 1));
  }
  return out;
}

double body_deviation(const Trajectory& super, const BodyTrajectory& body) {
  if (super.samples.size() != body.t.size())
    throw Error(ErrorCode::InvalidArgument, "trajectories have different grids");
  double worst = 0.0;
  for (std::size_t s = 0; s < body.t.size(); ++s)
    for (std::size_t k = 0; k < body.position[s].size(); ++k) {
      worst = std::max(worst, std::abs(super.samples[s].position[k].body() - body.position[s][k]));
      worst = std::max(worst, std::abs(super.samples[s].velocity[k].body() - body.velocity[s][k]));
    }
  return worst;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string mask_string(Grassmann::Mask mask, int L) {
  if (L == 0) return "-";
  std::string s(static_cast<std::size_t>(L), '0');
  for (int j = 0; j < L; ++j)
    if (mask & (Grassmann::Mask{1} << j)) s[static_cast<std::size_t>(j)] = '1';
  return s;
}

std::string trajectory_csv(const Trajectory& traj, const ChartSignature& sig) {
  std::string out = "t,block,coord,mask,value\n";
  const Grassmann::Mask size = Grassmann::Mask{1} << traj.L;
  auto emit = [&](const std::string& t, const char* block, const std::vector<Grassmann>& values) {
    for (int i = 0; i < sig.size(); ++i)
      for (Grassmann::Mask mask = 0; mask < size; ++mask) {
        if (mask_is_odd(mask) != sig.is_odd(i)) continue;
        out += t;
        out += ',';
        out += block;
        out += ',';
        out += sig.name(i);
        out += ',';
        out += mask_string(mask, traj.L);
        out += ',';
        out += format_double(values[static_cast<std::size_t>(i)].coeff(mask));
        out += '\n';
      }
  };
  for (const auto& s : traj.samples) {
    const std::string t = format_double(s.t);
    emit(t, "q", s.position);
    emit(t, "v", s.velocity);
  }
  return out;
}

}  // namespace sgeo
