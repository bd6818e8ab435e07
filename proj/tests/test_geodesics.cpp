#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sgeo/error.hpp"
#include "sgeo/geodesics.hpp"
#include "sgeo/rk4.hpp"
#include "support.hpp"

using namespace sgeo;
using namespace sgeo::test;

namespace {

InitialCondition make_ic(const MetricChart& m, int L, std::vector<Grassmann> q, std::vector<Grassmann> v) {
  (void)m;
  return InitialCondition{L, SuperPoint{L, std::move(q)}, std::move(v)};
}

std::vector<Grassmann> zeros(int n, int L) { return std::vector<Grassmann>(static_cast<std::size_t>(n), Grassmann(L)); }

InitialCondition random_ic(const MetricChart& m, int L, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  SuperPoint p = random_points(m, L, 1, seed, 0.3)[0];
  std::vector<Grassmann> v;
  for (int i = 0; i < m.dim(); ++i) {
    Grassmann g = random_element(rng, L, m.signature().is_odd(i) ? Kind::odd : Kind::even);
    g *= scale;
    v.push_back(g);
  }
  return {L, p, v};
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("geodesic right-hand side") {
  const MetricChart f = flat_1_2();
  std::mt19937_64 rng(1);
  const SuperPoint p = random_points(f, 2, 1, 1)[0];
  const std::vector<Grassmann> v{random_element(rng, 2, Kind::even), random_element(rng, 2, Kind::odd),
                                 random_element(rng, 2, Kind::odd)};
  for (const auto& a : geodesic_rhs(f, p, v)) CHECK(a.is_zero());

  // diag(1, x^2) at x = 2, v = (0, 1): a_x = -Gamma^x_yy = 2.
  const auto a = geodesic_rhs(polar(), SuperPoint::body_point(std::vector<double>{2.0, 0.0}, 0, 0),
                              std::vector<Grassmann>{Grassmann(0), Grassmann(0, 1.0)});
  CHECK(a[0].body() == doctest::Approx(2.0));
  CHECK(a[1].body() == doctest::Approx(0.0));

  // c metric at x = 0, v_x = 1, v_th1 = theta: a_th1 = -2 v_x v_th1 Gamma^th1_{x th1} = -theta.
  const Grassmann th = gen(1, 1);
  const auto b = geodesic_rhs(c_metric(), SuperPoint::body_point(std::vector<double>{0.0}, 2, 1),
                              std::vector<Grassmann>{Grassmann(1, 1.0), th, Grassmann(1)});
  CHECK(b[1].approx_equal(-th, 1e-14));
  CHECK(b[0].is_zero());
  CHECK(b[2].is_zero());
}

TEST_CASE("flat closed forms") {
  const MetricChart f = flat_1_2();
  const Trajectory t = integrate_geodesic(f, make_ic(f, 0, zeros(3, 0), {Grassmann(0, 1.0), Grassmann(0), Grassmann(0)}), 1.0, 1e-3);
  for (const auto& s : t.samples) {
    REQUIRE(std::abs(s.position[0].body() - s.t) <= 1e-12);
    REQUIRE(s.position[1].is_zero());
  }
  // Odd velocity theta on slot th2 gives q_k(t) = t theta delta_{k, th2}.
  std::vector<Grassmann> v = zeros(3, 1);
  v[2] = gen(1, 1);
  const Trajectory u = integrate_geodesic(f, make_ic(f, 1, zeros(3, 1), v), 1.0, 1e-3);
  CHECK(u.samples.size() == 1001);
  for (const auto& s : u.samples) {
    REQUIRE(s.position[0].is_zero());
    REQUIRE(s.position[1].is_zero());
    REQUIRE(std::abs(s.position[2].coeff(1) - s.t) <= 1e-12);
  }
}

TEST_CASE("integration is bitwise deterministic") {
  const MetricChart m = theta_coupled();
  const InitialCondition ic = random_ic(m, 3, 4, 0.5);
  const Trajectory a = integrate_geodesic(m, ic, 0.5, 1e-3), b = integrate_geodesic(m, ic, 0.5, 1e-3);
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t s = 0; s < a.samples.size(); ++s)
    for (int k = 0; k < m.dim(); ++k) {
      REQUIRE(a.samples[s].position[k] == b.samples[s].position[k]);
      REQUIRE(a.samples[s].velocity[k] == b.samples[s].velocity[k]);
    }
}

TEST_CASE("Goertsches mode on flat space") {
  const MetricChart f = flat_1_2();
  std::vector<Grassmann> q = zeros(3, 1), v = zeros(3, 1);
  q[1] = gen(1, 1);
  v[0] = Grassmann(1, 0.5);
  const Trajectory g = integrate_goertsches(f, make_ic(f, 1, q, v), 1.0, 1e-2);
  for (const auto& s : g.samples) {
    REQUIRE(s.position[1] == gen(1, 1));
    REQUIRE(s.velocity[1].is_zero());
    REQUIRE(std::abs(s.position[0].body() - 0.5 * s.t) <= 1e-12);
  }
  // Same data with zero odd velocity: the second-order equation is also constant.
  const Trajectory p = integrate_geodesic(f, make_ic(f, 1, q, v), 1.0, 1e-2);
  for (const auto& s : p.samples) REQUIRE(s.position[1] == gen(1, 1));
  // Nonzero odd velocity separates the two.
  v[1] = 0.5 * gen(1, 1);
  const Trajectory p2 = integrate_geodesic(f, make_ic(f, 1, q, v), 1.0, 1e-2);
  const Trajectory g2 = integrate_goertsches(f, make_ic(f, 1, q, v), 1.0, 1e-2);
  CHECK(std::abs(p2.samples.back().position[1].coeff(1) - 1.5) <= 1e-12);
  CHECK(g2.samples.back().position[1] == gen(1, 1));
}

TEST_CASE("Goertsches mode keeps even motion and follows the first-order odd law") {
  // On the c metric with odd velocity data the odd equation is
  // f_d' = -sum f_b f_x' Gamma^d_{x b}; for L = 1 with f_th1 = theta and
  // x(t) = x0 + t: f' = -f/(2c), so f(t) = theta * sqrt(c(x0)/c(x(t))).
  const MetricChart m = c_metric();
  std::vector<Grassmann> q = zeros(3, 1), v = zeros(3, 1);
  q[0] = Grassmann(1, 0.2);
  q[1] = gen(1, 1);
  v[0] = Grassmann(1, 1.0);
  const Trajectory g = integrate_goertsches(m, make_ic(m, 1, q, v), 1.0, 1e-3);
  for (const auto& s : g.samples) {
    const double want = std::sqrt(1.2 / (1.2 + s.t));
    REQUIRE(std::abs(s.position[1].coeff(1) - want) <= 1e-10);
    REQUIRE(std::abs(s.position[0].body() - (0.2 + s.t)) <= 1e-12);
  }
}

TEST_CASE("covariant derivative along t") {
  const MetricChart f = flat_1_2();
  const Trajectory t = integrate_geodesic(f, make_ic(f, 0, zeros(3, 0), {Grassmann(0, 1.0), Grassmann(0), Grassmann(0)}), 1.0, 1e-2);
  FieldSeries constant(t.samples.size(), std::vector<Grassmann>{Grassmann(0, 2.0), Grassmann(0), Grassmann(0)});
  for (const auto& row : covariant_derivative_t(f, t, constant))
    for (const auto& c : row) REQUIRE(c.max_abs() <= 1e-12);
  FieldSeries sq;
  for (const auto& s : t.samples) sq.push_back({Grassmann(0, s.t * s.t), Grassmann(0), Grassmann(0)});
  const FieldSeries d = covariant_derivative_t(f, t, sq);
  for (std::size_t s = 0; s < d.size(); ++s) REQUIRE(std::abs(d[s][0].body() - 2 * t.samples[s].t) <= 1e-10);

  Trajectory short_path = t;
  short_path.samples.resize(4);
  FieldSeries four(4, constant.front());
  CHECK(code_of([&] { covariant_derivative_t(f, short_path, four); }) == ErrorCode::GridTooShort);
}

TEST_CASE("covariant derivative along theta") {
  const MetricChart f = flat_1_2();
  const Trajectory t = integrate_geodesic(f, make_ic(f, 1, zeros(3, 1), {Grassmann(1, 1.0), Grassmann(1), Grassmann(1)}), 1.0, 0.1);
  FieldSeries x;
  for (const auto& s : t.samples) x.push_back({Grassmann(1), s.t * gen(1, 1), Grassmann(1)});
  const FieldSeries d = covariant_derivative_theta(f, t, x, 0);
  for (std::size_t s = 0; s < d.size(); ++s) REQUIRE(std::abs(d[s][1].body() - t.samples[s].t) <= 1e-14);

  // theta-free field along a theta-free curve.
  const MetricChart m = c_metric();
  const Trajectory u = integrate_geodesic(m, make_ic(m, 1, {Grassmann(1, 0.1), Grassmann(1), Grassmann(1)}, {Grassmann(1, 1.0), Grassmann(1), Grassmann(1)}), 0.5, 0.1);
  FieldSeries plain(u.samples.size(), std::vector<Grassmann>{Grassmann(1, 1.0), Grassmann(1), Grassmann(1)});
  for (const auto& row : covariant_derivative_theta(m, u, plain, 0))
    for (const auto& c : row) REQUIRE(c.is_zero());

  FieldSeries mixed(u.samples.size(), std::vector<Grassmann>{Grassmann(1, 1.0) + gen(1, 1), Grassmann(1), Grassmann(1)});
  CHECK(code_of([&] { covariant_derivative_theta(m, u, mixed, 0); }) == ErrorCode::NonHomogeneousField);
}

TEST_CASE("covariant derivative along theta: field parity flips the connection term") {
  // Curve with d_theta q_th1 = 1 (generator 1 of L = 2) and fields whose
  // components do not involve generator 1, so only the Gamma term survives:
  //   result_k = (-1)^{|X|+|x|} X_x d_th(q_th1) Gamma^k_{th1 x}.
  const MetricChart m = c_metric();
  const int L = 2;
  const Trajectory u = integrate_geodesic(m, make_ic(m, L, {Grassmann(L, 0.3), gen(L, 1), Grassmann(L)}, zeros(3, L)), 0.2, 0.1);
  const ChristoffelTable G = christoffel_at(m, u.point(0));
  FieldSeries even_field(u.samples.size(), std::vector<Grassmann>{Grassmann(L, 1.0), Grassmann(L), Grassmann(L)});
  FieldSeries odd_field(u.samples.size(), std::vector<Grassmann>{gen(L, 2), Grassmann(L), Grassmann(L)});
  const FieldSeries de = covariant_derivative_theta(m, u, even_field, 0);
  const FieldSeries dd = covariant_derivative_theta(m, u, odd_field, 0);
  const Grassmann dq = u.samples[0].position[1].left_derivative(0);
  CHECK(dq == Grassmann(L, 1.0));
  CHECK(max_abs_diff(de[0][1], Grassmann(L, 1.0) * dq * G(1, 1, 0)) <= 1e-14);
  CHECK(max_abs_diff(dd[0][1], -1.0 * (gen(L, 2) * dq * G(1, 1, 0))) <= 1e-14);
  CHECK(!de[0][1].is_zero());
}

TEST_CASE("invariants along integrated geodesics") {
  int runs = 0;
  for (const auto& m : curved_metrics())
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const InitialCondition ic = random_ic(m, 3, seed, 0.4);
      const Trajectory t = integrate_geodesic(m, ic, 1.0, 1e-3);
      REQUIRE(geodesic_residual(m, t) <= 1e-6);
      REQUIRE(speed_drift(m, t) <= 1e-8);
      const int ne = m.signature().even_count();
      std::vector<double> x0, v0;
      for (int k = 0; k < ne; ++k) {
        x0.push_back(ic.position.values[k].body());
        v0.push_back(ic.velocity[k].body());
      }
      REQUIRE(body_deviation(t, integrate_body_geodesic(reduce_body(m), x0, v0, 1.0, 1e-3)) <= 1e-8);
      for (const auto& s : t.samples)
        for (int k = 0; k < m.dim(); ++k) {
          const bool odd = m.signature().is_odd(k);
          s.position[k].for_each_term([&](Grassmann::Mask mask, double) { REQUIRE(mask_is_odd(mask) == odd); });
        }
      ++runs;
    }
  CHECK(runs == 9);
}

TEST_CASE("polar geodesics are straight lines") {
  // x = 2, y = 0, velocity (0, 1): in Cartesian terms the line (2, 2t), so
  // r(t) = 2 sqrt(1 + t^2) and phi(t) = atan(t).
  const MetricChart m = polar();
  const Trajectory t = integrate_geodesic(m, make_ic(m, 0, {Grassmann(0, 2.0), Grassmann(0)}, {Grassmann(0), Grassmann(0, 1.0)}), 1.0, 1e-3);
  for (const auto& s : t.samples) {
    REQUIRE(std::abs(s.position[0].body() - 2 * std::sqrt(1 + s.t * s.t)) <= 1e-10);
    REQUIRE(std::abs(s.position[1].body() - std::atan(s.t)) <= 1e-10);
  }
}

TEST_CASE("leaving the chart") {
  const MetricChart m = c_metric();
  const InitialCondition ic = make_ic(m, 0, {Grassmann(0, 0.0), Grassmann(0), Grassmann(0)}, {Grassmann(0, -3.0), Grassmann(0), Grassmann(0)});
  CHECK(code_of([&] { integrate_geodesic(m, ic, 1.0, 1e-2); }) == ErrorCode::LeftDomain);
  CHECK(code_of([&] { integrate_goertsches(m, ic, 1.0, 1e-2); }) == ErrorCode::LeftDomain);
}

TEST_CASE("initial condition validation") {
  const MetricChart m = c_metric();
  CHECK(code_of([&] { validate_initial_condition(m, make_ic(m, 1, zeros(3, 1), {Grassmann(1), Grassmann(1, 1.0), Grassmann(1)})); }) ==
        ErrorCode::ParityViolation);
  CHECK(code_of([&] { validate_initial_condition(m, make_ic(m, 1, zeros(3, 1), zeros(2, 1))); }) == ErrorCode::InvalidPoint);
  CHECK(code_of([&] { validate_initial_condition(m, make_ic(m, 1, zeros(3, 2), zeros(3, 1))); }) == ErrorCode::InvalidPoint);
  CHECK(code_of([&] { integrate_geodesic(m, make_ic(m, 1, zeros(3, 1), zeros(3, 1)), 1.0, 0.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("step grid ends on t_end") {
  const StepGrid g(1.0, 0.3);
  CHECK(g.steps == 4);
  CHECK(g.h == doctest::Approx(0.25));
  CHECK(StepGrid(1.0, 1e-3).steps == 1000);
  CHECK(StepGrid(0.0, 0.1).steps == 0);
}

TEST_CASE("trajectory CSV") {
  const MetricChart f = flat_1_2();
  std::vector<Grassmann> v = zeros(3, 2);
  v[1] = gen(2, 1);
  const Trajectory t = integrate_geodesic(f, make_ic(f, 2, zeros(3, 2), v), 0.5, 0.25);
  const std::string csv = trajectory_csv(t, f.signature());
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,block,coord,mask,value");
  int rows = 0;
  bool saw = false;
  while (std::getline(in, line)) {
    ++rows;
    if (line == "0.5,v,th1,10,1") saw = true;
  }
  // 3 samples x 2 blocks x (x: 2 even masks + th1, th2: 2 odd masks each).
  CHECK(rows == 3 * 2 * 6);
  CHECK(saw);
  CHECK(mask_string(0b01, 2) == "10");
  CHECK(mask_string(0, 0) == "-");
}
