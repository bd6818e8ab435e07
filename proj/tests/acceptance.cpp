// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sgeo/error.hpp"
#include "sgeo/verify.hpp"

using namespace sgeo;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kFlatClosedForm = 1e-9;
constexpr double kChristoffel = 1e-10;
constexpr double kRoundtrip = 1e-6;
constexpr double kConservation = 1e-8;
constexpr double kBody = 1e-8;
constexpr double kJacobian = 1e-5;
constexpr double kJacobianOdd = 1e-9;
constexpr double kJacobianStep = 1e-4;
constexpr double kNaturality = 1e-6;
constexpr double kNegative = 1e-3;
constexpr double kModeSlope = 1e-3;
constexpr double kModeAffine = 1e-12;
constexpr double kSymmetry = 1e-10;
constexpr double kCompatibility = 1e-8;
constexpr double kAlgebra = 1e-12;
constexpr double kInverse = 1e-10;
constexpr double kDt = 1e-3;
constexpr double kTEnd = 1.0;

const std::vector<std::string> kModels = {"flat_1_2", "flat_2_2", "c_metric_1_2", "polar_2_0", "theta_coupled_1_2"};

struct Outcome {
  bool pass = true;
  double deviation = 0.0;  // worst value seen
  double tolerance = 0.0;
  std::string note;

  void within(double d, const std::string& where = {}) {
    if (!(d <= tolerance)) {
      pass = false;
      if (note.empty()) note = where;
    }
    deviation = std::max(deviation, d);
  }
};

Model load(const std::string& name) { return load_model(std::string(SGEO_MODEL_DIR) + "/" + name + ".json"); }

double point_dev(const std::vector<Grassmann>& a, const std::vector<Grassmann>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, max_abs_diff(a[k], b[k]));
  return d;
}

std::vector<double> even_bodies(const MetricChart& m, const std::vector<Grassmann>& v) {
  std::vector<double> out;
  for (int k = 0; k < m.signature().even_count(); ++k) out.push_back(v[static_cast<std::size_t>(k)].body());
  return out;
}

Outcome flat_closed_form() {
  Outcome o{true, 0.0, kFlatClosedForm, {}};
  const Model model = load("flat_1_2");
  const MetricChart& m = model.metric;
  const Grassmann theta = Grassmann::generator(1, 0);
  for (int i = m.signature().even_count(); i < m.dim(); ++i) {
    std::vector<Grassmann> zero(static_cast<std::size_t>(m.dim()), Grassmann(1));
    InitialCondition ic{1, SuperPoint{1, zero}, zero};
    ic.velocity[static_cast<std::size_t>(i)] = theta;
    const Trajectory t = integrate_geodesic(m, ic, kTEnd, kDt);
    for (const auto& s : t.samples) {
      std::vector<Grassmann> want = zero;
      want[static_cast<std::size_t>(i)] = s.t * theta;
      o.within(point_dev(s.position, want), m.signature().name(i));
    }
    if (std::abs(t.samples.back().t - 1.0) > 1e-12) o.within(INFINITY, "grid does not end at t = 1");
  }
  return o;
}

Outcome christoffel_oracle() {
  Outcome o{true, 0.0, kChristoffel, {}};
  // diag(1, x^2): Gamma^y_xy = Gamma^y_yx = 1/x, Gamma^x_yy = -x.
  const Model polar = load("polar_2_0");
  for (double x : {0.5, 1.0, 2.0, 3.7}) {
    const ChristoffelTable g = christoffel_at(polar.metric, SuperPoint::body_point(std::vector<double>{x, 0.3}, 0, 0));
    double want[2][2][2] = {};
    want[1][0][1] = want[1][1][0] = 1.0 / x;
    want[0][1][1] = -x;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) o.within(max_abs_diff(g(k, i, j), Grassmann(0, want[k][i][j])), "polar");
  }
  // c(x) = 1 + x on 1|2: Gamma^{th_a}_{x th_a} = Gamma^{th_a}_{th_a x} = c'/(2c),
  // Gamma^x_{th1 th2} = -c'/2 = -Gamma^x_{th2 th1}; everything else vanishes.
  const Model cm = load("c_metric_1_2");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> odd(-1.0, 1.0);
  for (double x : {-0.5, 0.0, 1.0, 2.5}) {
    const int L = 2;
    SuperPoint p = SuperPoint::body_point(std::vector<double>{x}, 2, L);
    for (int a = 1; a <= 2; ++a)
      for (Grassmann::Mask mask : {Grassmann::Mask{1}, Grassmann::Mask{2}}) p.values[static_cast<std::size_t>(a)].set(mask, odd(rng));
    const ChristoffelTable g = christoffel_at(cm.metric, p);
    const double c = 1.0 + x;
    double want[3][3][3] = {};
    want[1][0][1] = want[1][1][0] = want[2][0][2] = want[2][2][0] = 0.5 / c;
    want[0][1][2] = -0.5;
    want[0][2][1] = 0.5;
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) o.within(max_abs_diff(g(k, i, j), Grassmann(L, want[k][i][j])), "c metric");
  }
  return o;
}

template <class F>
void for_each_ic(F&& f) {
  for (const auto& name : kModels) {
    const Model model = load(name);
    for (const auto& nic : model.initial_conditions) f(model, nic);
  }
}

Outcome roundtrip() {
  Outcome o{true, 0.0, kRoundtrip, {}};
  for_each_ic([&](const Model& model, const NamedInitialCondition& nic) {
    const RoundtripReport r = roundtrip_check(model.metric, nic.ic, kTEnd, kDt);
    const std::string where = model.name + "/" + nic.name;
    o.within(r.position, where);
    o.within(r.momentum, where);
    o.within(r.velocity, where);
  });
  return o;
}

Outcome conservation() {
  Outcome o{true, 0.0, kConservation, {}};
  for_each_ic([&](const Model& model, const NamedInitialCondition& nic) {
    const std::string where = model.name + "/" + nic.name;
    o.within(speed_drift(model.metric, integrate_geodesic(model.metric, nic.ic, kTEnd, kDt)), where + " speed");
    o.within(energy_drift(integrate_flow(model.metric, to_phase_point(model.metric, nic.ic), kTEnd, kDt)), where + " energy");
  });
  return o;
}

Outcome body_reduction() {
  Outcome o{true, 0.0, kBody, {}};
  for_each_ic([&](const Model& model, const NamedInitialCondition& nic) {
    const MetricChart& m = model.metric;
    const BodyMetric b = reduce_body(m);
    const std::string where = model.name + "/" + nic.name;
    const auto x0 = even_bodies(m, nic.ic.position.values);
    const Trajectory t = integrate_geodesic(m, nic.ic, kTEnd, kDt);
    o.within(body_deviation(t, integrate_body_geodesic(b, x0, even_bodies(m, nic.ic.velocity), kTEnd, kDt)), where);
    const PhasePoint s = to_phase_point(m, nic.ic);
    const FlowState f = integrate_flow(m, s, kTEnd, kDt);
    o.within(body_flow_deviation(f, integrate_body_flow(b, x0, even_bodies(m, s.momenta), kTEnd, kDt)), where + " flow");
  });
  // Closed form on the polar chart: geodesics are straight lines in the plane.
  const Model polar = load("polar_2_0");
  const InitialCondition ic{0, SuperPoint::body_point(std::vector<double>{2.0, 0.0}, 0, 0), {Grassmann(0), Grassmann(0, 1.0)}};
  for (const auto& s : integrate_geodesic(polar.metric, ic, kTEnd, kDt).samples) {
    o.within(std::abs(s.position[0].body() - 2.0 * std::sqrt(1.0 + s.t * s.t)), "polar line");
    o.within(std::abs(s.position[1].body() - std::atan(s.t)), "polar line");
  }
  return o;
}

Outcome exp_jacobian(Outcome& odd_block) {
  Outcome o{true, 0.0, kJacobian, {}};
  for (const auto& name : kModels) {
    const Model model = load(name);
    if (model.body_grid.size() < 5) o.within(INFINITY, name + ": body grid has fewer than 5 points");
    for (const auto& q : model.body_grid) {
      const JacobianReport r = exp_jacobian_check(model.metric, q, kJacobianStep, kDt);
      o.within(r.deviation, name);
      odd_block.within(r.odd_deviation, name);
    }
  }
  return o;
}

Outcome naturality(Outcome& negative, int& fixtures) {
  Outcome o{true, 0.0, kNaturality, {}};
  for (const auto& name : kModels) {
    const Model model = load(name);
    for (const auto& nm : model.morphisms) {
      if (nm.role == MorphismRole::linearization) continue;
      const std::vector<std::vector<double>>& bases = nm.bases.empty() ? model.body_grid : nm.bases;
      std::vector<TangentFiberPoint> vs;
      std::uint64_t seed = 1;
      for (const auto& b : bases)
        for (const auto& v : random_vectors(model.metric, b, model.L, 3, seed++, model.vector_scale)) vs.push_back(v);
      const double d = naturality_deviation(model.metric, nm.phi, vs, kDt);
      if (nm.role == MorphismRole::isometry) {
        o.within(d, name + "/" + nm.name);
        ++fixtures;
      } else if (nm.breaks_naturality) {
        // Negative control: the deviation has to be large.
        if (!(d > kNegative)) negative.within(INFINITY, name + "/" + nm.name);
        negative.deviation = negative.deviation == 0.0 ? d : std::min(negative.deviation, d);
      }
    }
  }
  return o;
}

Outcome mode_divergence() {
  Outcome o{true, 0.0, kModeAffine, {}};
  const Model model = load("flat_1_2");
  const MetricChart& m = model.metric;
  const int L = 1;
  const Grassmann theta = Grassmann::generator(L, 0);
  const double slope = 0.5;
  std::vector<Grassmann> q(3, Grassmann(L)), v(3, Grassmann(L));
  q[1] = theta;
  v[1] = slope * theta;
  const InitialCondition ic{L, SuperPoint{L, q}, v};
  const Trajectory paper = integrate_geodesic(m, ic, kTEnd, kDt);
  const Trajectory goertsches = integrate_goertsches(m, ic, kTEnd, kDt);
  for (std::size_t s = 0; s < paper.samples.size(); ++s) {
    const double t = paper.samples[s].t;
    std::vector<Grassmann> affine = q, constant = q;
    affine[1] = (1.0 + slope * t) * theta;
    o.within(point_dev(paper.samples[s].position, affine), "paper mode not affine");
    o.within(point_dev(goertsches.samples[s].position, constant), "Goertsches mode not constant");
  }
  const double moved = paper.samples.back().position[1].coeff(1) - paper.samples.front().position[1].coeff(1);
  if (!(std::abs(moved) >= kModeSlope)) o.within(INFINITY, "paper mode slope vanishes");
  return o;
}

Outcome structural(std::string& detail) {
  Outcome o{true, 0.0, 0.0, {}};
  double sym = 0.0, compat = 0.0, laws = 0.0, inv = 0.0;
  int points = 0;
  for (const auto& name : kModels) {
    const Model model = load(name);
    for (const auto& p : random_points(model.metric, 3, 100, 29)) {
      const ChristoffelTable g = christoffel_at(model.metric, p);
      sym = std::max({sym, christoffel_symmetry_defect(model.metric, g), christoffel_parity_defect(model.metric, g)});
      compat = std::max(compat, test::compatibility_oracle(model.metric, p));
      ++points;
    }
  }
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int L = 6;
  auto random = [&](int parity) {
    Grassmann g(L);
    for (Grassmann::Mask m = 0; m < g.basis_size(); ++m)
      if (parity < 0 || static_cast<int>(mask_is_odd(m)) == parity) g.set(m, u(rng));
    return g;
  };
  for (int n = 0; n < 1000; ++n) {
    const int pa = n % 2, pb = (n / 2) % 2;
    const Grassmann a = random(pa), b = random(pb), c = random(-1);
    laws = std::max(laws, max_abs_diff((a * b) * c, a * (b * c)));
    laws = std::max(laws, max_abs_diff(a * (b + c), a * b + a * c));
    laws = std::max(laws, max_abs_diff((b + c) * a, b * a + c * a));
    laws = std::max(laws, max_abs_diff(a * b, test::sgn(pa * pb) * (b * a)));
    Grassmann e = random(0);
    e.set(0, 0.5 + std::abs(u(rng)));
    inv = std::max({inv, max_abs_diff(e * e.inverse(), Grassmann(L, 1.0)), max_abs_diff(e.inverse() * e, Grassmann(L, 1.0))});
  }
  char buf[320];
  std::snprintf(buf, sizeof buf, "max_dev is the worst dev/tol ratio; symmetry/parity %.2e (tol %.0e), compatibility %.2e (tol %.0e) on %d points, "
                "algebra %.2e (tol %.0e), inverse %.2e (tol %.0e)",
                sym, kSymmetry, compat, kCompatibility, points, laws, kAlgebra, inv, kInverse);
  detail = buf;
  o.pass = sym <= kSymmetry && compat <= kCompatibility && laws <= kAlgebra && inv <= kInverse;
  o.deviation = std::max({sym / kSymmetry, compat / kCompatibility, laws / kAlgebra, inv / kInverse});
  o.tolerance = 1.0;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(int& runs) {
  Outcome o{true, 0.0, 0.0, {}};
  const fs::path dir = fs::temp_directory_path() / ("sgeo_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  for (const auto& name : kModels) {
    const Model model = load(name);
    const std::string path = std::string(SGEO_MODEL_DIR) + "/" + name + ".json";
    for (const auto& nic : model.initial_conditions)
      for (const char* cmd : {"geodesic", "flow"}) {
        std::string out[2];
        for (int r = 0; r < 2; ++r) {
          const fs::path file = dir / (std::string(cmd) + std::to_string(r) + ".csv");
          const std::string line = std::string(SGEO_CLI) + " " + cmd + " --model " + path + " --ic " + nic.name +
                                   " --out " + file.string() + " >/dev/null 2>&1";
          const int status = std::system(line.c_str());
          if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) o.within(INFINITY, name + "/" + nic.name + " " + cmd + " failed");
          out[r] = slurp(file);
        }
        if (out[0].empty() || out[0] != out[1]) o.within(INFINITY, name + "/" + nic.name + " " + cmd + " differs");
        ++runs;
      }
  }
  fs::remove_all(dir);
  return o;
}

int report(int id, const char* title, const Outcome& o, const std::string& detail = {}) {
  std::printf("criterion %2d %s  %-28s max_dev=%.3e tol=%.0e%s%s\n", id, o.pass ? "PASS" : "FAIL", title, o.deviation,
              o.tolerance, detail.empty() ? "" : "  ", detail.c_str());
  if (!o.pass && !o.note.empty()) std::printf("             first failure: %s\n", o.note.c_str());
  std::fflush(stdout);
  return o.pass ? 0 : 1;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return Outcome{false, INFINITY, 0.0, e.what()};
  }
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  int failed = 0;
  failed += report(1, "flat closed form t*theta", guarded(flat_closed_form));
  failed += report(2, "Christoffel oracles", guarded(christoffel_oracle));
  failed += report(3, "geodesic/flow round trip", guarded(roundtrip));
  failed += report(4, "energy and speed drift", guarded(conservation));
  failed += report(5, "body reduction", guarded(body_reduction));
  {
    Outcome odd{true, 0.0, kJacobianOdd, {}};
    Outcome even = guarded([&] { return exp_jacobian(odd); });
    char buf[96];
    std::snprintf(buf, sizeof buf, "odd block %.3e (tol %.0e)", odd.deviation, kJacobianOdd);
    if (!odd.pass) {
      even.pass = false;
      if (even.note.empty()) even.note = "odd block: " + odd.note;
    }
    failed += report(6, "T_0 exp = id", even, buf);
  }
  {
    Outcome negative{true, 0.0, kNegative, {}};
    int fixtures = 0;
    Outcome nat = guarded([&] { return naturality(negative, fixtures); });
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d isometries; negative controls min %.3e (must exceed %.0e)", fixtures,
                  negative.deviation, kNegative);
    if (!negative.pass || negative.deviation == 0.0 || fixtures == 0) {
      nat.pass = false;
      if (nat.note.empty()) nat.note = negative.note.empty() ? "no fixtures" : "negative control: " + negative.note;
    }
    failed += report(7, "isometry naturality", nat, buf);
  }
  failed += report(8, "mode divergence", guarded(mode_divergence));
  {
    std::string detail;
    failed += report(9, "structural invariants", guarded([&] { return structural(detail); }), detail);
  }
  {
    int runs = 0;
    Outcome d = guarded([&] { return determinism(runs); });
    failed += report(10, "byte-identical CLI output", d, std::to_string(runs) + " command pairs");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of 10 criteria failed (%.1f s)\n", failed, secs);
  return failed == 0 ? 0 : 1;
}
