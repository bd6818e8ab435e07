#include "sgeo/expmap.hpp"

#include <algorithm>
#include <cmath>

#include "sgeo/error.hpp"

namespace sgeo {

InitialCondition to_initial_condition(const MetricChart& m, const TangentFiberPoint& v) {
  const ChartSignature& sig = m.signature();
  if (static_cast<int>(v.base.size()) != sig.even_count())
    throw Error(ErrorCode::InvalidPoint, "base point needs one value per even coordinate");
  InitialCondition ic;
  ic.L = v.L;
  ic.position = SuperPoint::body_point(v.base, sig.odd_count(), v.L);
  ic.velocity = v.vector;
  return ic;
}

SuperPoint exp_at(const MetricChart& m, const TangentFiberPoint& v, double dt) {
  const Trajectory traj = integrate_geodesic(m, to_initial_condition(m, v), 1.0, dt);
  return traj.point(traj.samples.size() - 1);
}

ChartSignature tangent_signature(const ChartSignature& sig) {
  std::vector<std::string> even = sig.even_names(), odd = sig.odd_names();
  for (const auto& n : sig.even_names()) even.push_back("v_" + n);
  for (const auto& n : sig.odd_names()) odd.push_back("v_" + n);
  return ChartSignature(std::move(even), std::move(odd));
}

namespace {

// Index of q_i and v_i inside tangent_signature(sig).
int tq(const ChartSignature& sig, int i) {
  const int m = sig.even_count();
  return sig.is_odd(i) ? 2 * m + (i - m) : i;
}
int tv(const ChartSignature& sig, int i) {
  const int m = sig.even_count();
  return sig.is_odd(i) ? 2 * m + sig.odd_count() + (i - m) : m + i;
}

}  // namespace

SuperMorphism tangent_map(const SuperMorphism& phi) {
  const ChartSignature& s = phi.source;
  const ChartSignature& t = phi.target;
  if (static_cast<int>(phi.pullbacks.size()) != t.size())
    throw Error(ErrorCode::SignatureMismatch, "one pullback per target coordinate required");
  std::vector<Expr> lift;
  for (int i = 0; i < s.size(); ++i) lift.push_back(Expr::variable(tq(s, i), s.is_odd(i)));

  std::vector<Expr> pull(static_cast<std::size_t>(2 * t.size()));
  for (int j = 0; j < t.size(); ++j) {
    const Expr& f = phi.pullbacks[static_cast<std::size_t>(j)];
    pull[static_cast<std::size_t>(tq(t, j))] = substitute(f, lift);
    std::vector<Expr> terms;
    for (int i = 0; i < s.size(); ++i) {
      const Expr d = partial(f, i, s.is_odd(i));
      if (d.is_zero()) continue;
      terms.push_back(Expr::variable(tv(s, i), s.is_odd(i)) * substitute(d, lift));
    }
    pull[static_cast<std::size_t>(tv(t, j))] = Expr::sum(std::move(terms));
  }
  return make_morphism(tangent_signature(s), tangent_signature(t), std::move(pull));
}

Eigen::MatrixXd numerical_tangent_map(const SuperMorphism& phi, std::span<const double> q) {
  const ChartSignature& s = phi.source;
  const ChartSignature& t = phi.target;
  if (static_cast<int>(q.size()) != s.even_count())
    throw Error(ErrorCode::InvalidPoint, "base point needs one value per even source coordinate");
  const SuperPoint p = SuperPoint::body_point(q, s.odd_count(), 0);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(t.size(), s.size());
  for (int a = 0; a < t.size(); ++a)
    for (int i = 0; i < s.size(); ++i) {
      if (s.is_odd(i) != t.is_odd(a)) continue;  // parity forces a zero body
      const Expr d = partial(phi.pullbacks[static_cast<std::size_t>(a)], i, s.is_odd(i));
      if (!d.is_zero()) j(a, i) = evaluate(d, p.values, 0).body();
    }
  return j;
}

JacobianReport exp_jacobian_check(const MetricChart& m, std::span<const double> q, double h, double dt) {
  const ChartSignature& sig = m.signature();
  const int n = sig.size();
  const int ne = sig.even_count();
  JacobianReport r;
  r.jacobian = Eigen::MatrixXd::Zero(n, n);
  const std::vector<double> base(q.begin(), q.end());

  for (int i = 0; i < ne; ++i) {
    TangentFiberPoint plus{base, 0, std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(0))};
    TangentFiberPoint minus = plus;
    plus.vector[i] = Grassmann(0, h);
    minus.vector[i] = Grassmann(0, -h);
    const SuperPoint a = exp_at(m, plus, dt), b = exp_at(m, minus, dt);
    for (int k = 0; k < ne; ++k) r.jacobian(k, i) = (a.values[k].body() - b.values[k].body()) / (2.0 * h);
  }
  for (int i = ne; i < n; ++i) {
    TangentFiberPoint v{base, 1, std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(1))};
    v.vector[i] = Grassmann::generator(1, 0);
    const SuperPoint out = exp_at(m, v, dt);
    for (int k = ne; k < n; ++k) r.jacobian(k, i) = out.values[k].coeff(1);
  }
  const Eigen::MatrixXd diff = r.jacobian - Eigen::MatrixXd::Identity(n, n);
  r.deviation = n > 0 ? diff.cwiseAbs().maxCoeff() : 0.0;
  if (n > ne) r.odd_deviation = diff.bottomRightCorner(n - ne, n - ne).cwiseAbs().maxCoeff();
  return r;
}

namespace {

double sign_of(int parity_sum) { return (parity_sum & 1) ? -1.0 : 1.0; }

double isometry_deviation(const MetricChart& src, const MetricChart& dst, const SuperMorphism& phi,
                          const SuperPoint& p) {
  const ChartSignature& s = src.signature();
  const ChartSignature& t = dst.signature();
  const int L = p.L;
  const SuperMatrix gm = metric_at(src, p);
  const SuperPoint image = apply(phi, p);
  require_valid_point(dst, image);
  const SuperMatrix gn = metric_at(dst, image);

  // d[i][k] = d_i Phi*(q_k) at p
  std::vector<Grassmann> d(static_cast<std::size_t>(s.size()) * t.size(), Grassmann(L));
  for (int i = 0; i < s.size(); ++i)
    for (int k = 0; k < t.size(); ++k) {
      const Expr e = partial(phi.pullbacks[static_cast<std::size_t>(k)], i, s.is_odd(i));
      if (!e.is_zero()) d[static_cast<std::size_t>(i) * t.size() + k] = evaluate(e, p.values, L);
    }
  auto at = [&](int i, int k) -> const Grassmann& { return d[static_cast<std::size_t>(i) * t.size() + k]; };

  double worst = 0.0;
  for (int i = 0; i < s.size(); ++i)
    for (int j = 0; j < s.size(); ++j) {
      Grassmann rhs(L);
      for (int k = 0; k < t.size(); ++k) {
        if (at(i, k).is_zero()) continue;
        for (int l = 0; l < t.size(); ++l) {
          if (at(j, l).is_zero() || gn(k, l).is_zero()) continue;
          rhs.axpy(sign_of(t.parity_bit(k) * (s.parity_bit(j) + t.parity_bit(l))), at(i, k) * at(j, l) * gn(k, l));
        }
      }
      worst = std::max(worst, max_abs_diff(gm(i, j), rhs));
    }
  return worst;
}

}  // namespace

CheckReport isometry_check(const MetricChart& src, const MetricChart& dst, const SuperMorphism& phi,
                           std::span<const SuperPoint> samples, double tol) {
  CheckReport r;
  if (!(phi.source == src.signature()) || !(phi.target == dst.signature())) {
    r.message = "morphism signature does not match the metrics";
    r.deviation = INFINITY;
    return r;
  }
  try {
    for (const auto& p : samples) r.deviation = std::max(r.deviation, isometry_deviation(src, dst, phi, p));
  } catch (const Error& e) {
    r.deviation = INFINITY;
    r.message = e.what();
    return r;
  }
  r.pass = r.deviation <= tol;
  if (!r.pass) r.message = "metric not preserved";
  return r;
}

namespace {

TangentFiberPoint push_forward(const MetricChart& m, const SuperMorphism& phi, const TangentFiberPoint& v) {
  const ChartSignature& sig = m.signature();
  const int ne = sig.even_count();
  const Eigen::MatrixXd j = numerical_tangent_map(phi, v.base);
  const SuperPoint q = SuperPoint::body_point(v.base, sig.odd_count(), 0);
  const SuperPoint image = apply(phi, q);
  TangentFiberPoint w;
  for (int k = 0; k < ne; ++k) w.base.push_back(image.values[k].body());
  w.L = v.L;
  w.vector.assign(static_cast<std::size_t>(sig.size()), Grassmann(v.L));
  for (int k = 0; k < sig.size(); ++k)
    for (int i = 0; i < sig.size(); ++i)
      if (j(k, i) != 0.0) w.vector[k].axpy(j(k, i), v.vector[i]);
  return w;
}

double point_deviation(const SuperPoint& a, const SuperPoint& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, max_abs_diff(a.values[k], b.values[k]));
  return worst;
}

}  // namespace

double naturality_deviation(const MetricChart& m, const SuperMorphism& phi, std::span<const TangentFiberPoint> vectors,
                            double dt) {
  double worst = 0.0;
  for (const auto& v : vectors) {
    const SuperPoint lhs = apply(phi, exp_at(m, v, dt));
    const SuperPoint rhs = exp_at(m, push_forward(m, phi, v), dt);
    worst = std::max(worst, point_deviation(lhs, rhs));
  }
  return worst;
}

CheckReport naturality_check(const MetricChart& m, const SuperMorphism& phi,
                             std::span<const TangentFiberPoint> vectors, double dt, double tol) {
  CheckReport r;
  try {
    r.deviation = naturality_deviation(m, phi, vectors, dt);
  } catch (const Error& e) {
    r.deviation = INFINITY;
    r.message = e.what();
    return r;
  }
  r.pass = r.deviation <= tol;
  if (!r.pass) r.message = "exp does not commute with the morphism";
  return r;
}

const char* to_string(LinearizationStatus s) noexcept {
  switch (s) {
    case LinearizationStatus::passed: return "passed";
    case LinearizationStatus::failed: return "failed";
    case LinearizationStatus::not_isometry: return "not an isometry";
    case LinearizationStatus::hypotheses_not_met: return "hypotheses not met";
  }
  return "?";
}

LinearizationReport linearization_test(const MetricChart& m, const SuperMorphism& phi,
                                       std::span<const SuperPoint> samples,
                                       std::span<const TangentFiberPoint> vectors, double dt, double tol, int sign) {
  LinearizationReport r;
  const CheckReport iso = isometry_check(m, m, phi, samples, tol);
  if (!iso.pass) {
    r.status = LinearizationStatus::not_isometry;
    r.deviation = iso.deviation;
    r.message = iso.message;
    return r;
  }
  const ChartSignature& sig = m.signature();
  const Eigen::MatrixXd want = static_cast<double>(sign) * Eigen::MatrixXd::Identity(sig.size(), sig.size());
  for (const auto& v : vectors) {
    const SuperPoint image = apply(phi, SuperPoint::body_point(v.base, sig.odd_count(), 0));
    double moved = 0.0;
    for (int k = 0; k < sig.even_count(); ++k) moved = std::max(moved, std::abs(image.values[k].body() - v.base[k]));
    const double lin = (numerical_tangent_map(phi, v.base) - want).cwiseAbs().maxCoeff();
    if (moved > tol || lin > tol) {
      r.status = LinearizationStatus::hypotheses_not_met;
      r.deviation = std::max(moved, lin);
      r.message = moved > tol ? "base point is not fixed" : "tangent map differs from the expected identity";
      return r;
    }
  }
  try {
    for (const auto& v : vectors) {
      TangentFiberPoint w = v;
      for (auto& c : w.vector) c *= static_cast<double>(sign);
      r.deviation = std::max(r.deviation, point_deviation(apply(phi, exp_at(m, v, dt)), exp_at(m, w, dt)));
    }
  } catch (const Error& e) {
    r.status = LinearizationStatus::failed;
    r.deviation = INFINITY;
    r.message = e.what();
    return r;
  }
  r.status = r.deviation <= tol ? LinearizationStatus::passed : LinearizationStatus::failed;
  return r;
}

}  // namespace sgeo
