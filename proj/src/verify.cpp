#include "sgeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "sgeo/error.hpp"

namespace sgeo {

Suite parse_suite(const std::string& name) {
  for (Suite s : {Suite::all, Suite::metric, Suite::geodesic, Suite::flow, Suite::exp, Suite::isometry})
    if (name == to_string(s)) return s;
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
}

const char* to_string(Suite s) noexcept {
  switch (s) {
    case Suite::all: return "all";
    case Suite::metric: return "metric";
    case Suite::geodesic: return "geodesic";
    case Suite::flow: return "flow";
    case Suite::exp: return "exp";
    case Suite::isometry: return "isometry";
  }
  return "?";
}

bool VerifyReport::pass() const {
  return std::all_of(items.begin(), items.end(), [](const CheckItem& c) { return c.pass; });
}

namespace {

double sign_of(int parity_sum) { return (parity_sum & 1) ? -1.0 : 1.0; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kSamplePoints = 20;
constexpr int kCompatibilityPoints = 100;
constexpr int kVectorsPerBase = 2;

}  // namespace

double compatibility_defect(const MetricChart& m, const SuperPoint& p) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  const SuperMatrix g = metric_at(m, p);
  const ChristoffelTable gamma = christoffel_at(m, p);
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const int pi = sig.parity_bit(i), pj = sig.parity_bit(j), pk = sig.parity_bit(k);
        const Expr& d = m.entry_partial(i, j, k);
        Grassmann lhs = d.is_zero() ? Grassmann(p.L) : evaluate(d, p.values, p.L);
        for (int l = 0; l < n; ++l) {
          const int pl = sig.parity_bit(l);
          lhs -= gamma(l, i, j) * g(l, k);
          lhs.axpy(-sign_of(pi * pj) * sign_of((pi + pk + pl) * pj), gamma(l, i, k) * g(j, l));
        }
        worst = std::max(worst, lhs.max_abs());
      }
  return worst;
}

double christoffel_symmetry_defect(const MetricChart& m, const ChristoffelTable& g) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        worst = std::max(worst, (g(k, i, j) - sign_of(sig.parity_bit(i) * sig.parity_bit(j)) * g(k, j, i)).max_abs());
  return worst;
}

double christoffel_parity_defect(const MetricChart& m, const ChristoffelTable& g) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const bool odd = ((sig.parity_bit(i) + sig.parity_bit(j) + sig.parity_bit(k)) & 1) != 0;
        g(k, i, j).for_each_term([&](Grassmann::Mask mask, double c) {
          if (mask_is_odd(mask) != odd) worst = std::max(worst, std::abs(c));
        });
      }
  return worst;
}

std::vector<TangentFiberPoint> random_vectors(const MetricChart& m, const std::vector<double>& base, int L, int count,
                                              std::uint64_t seed, double scale) {
  const ChartSignature& sig = m.signature();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TangentFiberPoint> out;
  for (int c = 0; c < count; ++c) {
    TangentFiberPoint v{base, L, {}};
    for (int i = 0; i < sig.size(); ++i) {
      Grassmann g(L);
      for (Grassmann::Mask mask = 0; mask < g.basis_size(); ++mask)
        if (mask_is_odd(mask) == sig.is_odd(i)) g.set(mask, scale * u(rng));
      v.vector.push_back(std::move(g));
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

using Job = std::function<CheckItem()>;

CheckItem bounded(std::string name, double dev, double tol, std::string detail = {}) {
  return {std::move(name), dev, tol, dev <= tol, false, std::move(detail)};
}

CheckItem exceeding(std::string name, double dev, double tol, std::string detail = {}) {
  return {std::move(name), dev, tol, dev > tol, true, std::move(detail)};
}

std::vector<SuperPoint> samples(const Model& model, int count, std::uint64_t seed) {
  return random_points(model.metric, model.L, count, seed);
}

bool identical(const Trajectory& a, const Trajectory& b) {
  if (a.samples.size() != b.samples.size()) return false;
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    if (a.samples[s].t != b.samples[s].t) return false;
    for (std::size_t k = 0; k < a.samples[s].position.size(); ++k)
      if (!(a.samples[s].position[k] == b.samples[s].position[k]) ||
          !(a.samples[s].velocity[k] == b.samples[s].velocity[k]))
        return false;
  }
  return true;
}

void metric_jobs(const Model& model, std::vector<Job>& jobs) {
  const MetricChart& m = model.metric;
  const Tolerances& tol = model.tol;
  jobs.push_back([&] {
    const auto pts = samples(model, kSamplePoints, 11);
    const MetricValidation v = metric_validate(m, pts, tol.identity);
    return CheckItem{"metric.validate", v.ok ? 0.0 : kNaN, tol.identity, v.ok, false, v.failure};
  });
  jobs.push_back([&] {
    double worst = 0.0;
    for (const auto& p : samples(model, kSamplePoints, 12)) {
      const SuperMatrix prod = metric_inverse_at(m, p) * metric_at(m, p);
      for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
          worst = std::max(worst, max_abs_diff(prod(i, j), Grassmann(p.L, i == j ? 1.0 : 0.0)));
    }
    return bounded("metric.inverse", worst, tol.identity);
  });
  jobs.push_back([&] {
    double sym = 0.0;
    for (const auto& p : samples(model, kSamplePoints, 13))
      sym = std::max(sym, christoffel_symmetry_defect(m, christoffel_at(m, p)));
    return bounded("metric.christoffel_symmetry", sym, tol.identity);
  });
  jobs.push_back([&] {
    double par = 0.0;
    for (const auto& p : samples(model, kSamplePoints, 14))
      par = std::max(par, christoffel_parity_defect(m, christoffel_at(m, p)));
    return bounded("metric.christoffel_parity", par, tol.identity);
  });
  jobs.push_back([&] {
    double worst = 0.0;
    for (const auto& p : samples(model, kCompatibilityPoints, 15)) worst = std::max(worst, compatibility_defect(m, p));
    return bounded("metric.compatibility", worst, tol.compatibility);
  });
  jobs.push_back([&] {
    const BodyMetric body = reduce_body(m);
    const int ne = m.signature().even_count();
    double worst = 0.0;
    for (const auto& p : random_points(m, 0, kSamplePoints, 16)) {
      const auto x = p.body();
      const auto classical = body.christoffel(std::span<const double>(x.data(), static_cast<std::size_t>(ne)));
      const ChristoffelTable super = christoffel_at(m, p);
      for (int k = 0; k < ne; ++k)
        for (int i = 0; i < ne; ++i)
          for (int j = 0; j < ne; ++j)
            worst = std::max(worst, std::abs(super(k, i, j).body() - classical[(static_cast<std::size_t>(k) * ne + i) * ne + j]));
    }
    return bounded("metric.body_christoffel", worst, tol.identity);
  });
}

std::vector<double> even_bodies(const InitialCondition& ic, int ne, bool position) {
  std::vector<double> out;
  for (int k = 0; k < ne; ++k) out.push_back(position ? ic.position.values[k].body() : ic.velocity[k].body());
  return out;
}

void geodesic_jobs(const Model& model, std::vector<Job>& jobs) {
  const MetricChart& m = model.metric;
  const Tolerances& tol = model.tol;
  const int ne = m.signature().even_count();
  for (const auto& nic : model.initial_conditions) {
    const std::string base = "geodesic." + nic.name;
    jobs.push_back([&, base] {
      return bounded(base + ".residual", geodesic_residual(m, integrate_geodesic(m, nic.ic, model.t_end, model.dt)),
                     tol.residual);
    });
    jobs.push_back([&, base] {
      return bounded(base + ".speed", speed_drift(m, integrate_geodesic(m, nic.ic, model.t_end, model.dt)),
                     tol.conservation);
    });
    jobs.push_back([&, base, ne] {
      const Trajectory t = integrate_geodesic(m, nic.ic, model.t_end, model.dt);
      const BodyTrajectory b = integrate_body_geodesic(reduce_body(m), even_bodies(nic.ic, ne, true),
                                                       even_bodies(nic.ic, ne, false), model.t_end, model.dt);
      return bounded(base + ".body", body_deviation(t, b), tol.body);
    });
    jobs.push_back([&, base] {
      const bool same = identical(integrate_geodesic(m, nic.ic, model.t_end, model.dt),
                                  integrate_geodesic(m, nic.ic, model.t_end, model.dt));
      return CheckItem{base + ".determinism", same ? 0.0 : 1.0, 0.0, same, false, {}};
    });
  }
}

void flow_jobs(const Model& model, std::vector<Job>& jobs) {
  const MetricChart& m = model.metric;
  const Tolerances& tol = model.tol;
  const int ne = m.signature().even_count();
  for (const auto& nic : model.initial_conditions) {
    const std::string base = "flow." + nic.name;
    jobs.push_back([&, base] {
      return bounded(base + ".energy",
                     energy_drift(integrate_flow(m, to_phase_point(m, nic.ic), model.t_end, model.dt)),
                     tol.conservation);
    });
    jobs.push_back([&, base] {
      const bool ok = flow_preserves_parity(m, integrate_flow(m, to_phase_point(m, nic.ic), model.t_end, model.dt));
      return CheckItem{base + ".parity", ok ? 0.0 : 1.0, 0.0, ok, false, {}};
    });
    jobs.push_back([&, base] {
      const RoundtripReport r = roundtrip_check(m, nic.ic, model.t_end, model.dt);
      char detail[160];
      std::snprintf(detail, sizeof detail, "position %.3g momentum %.3g velocity %.3g initial %.3g", r.position,
                    r.momentum, r.velocity, r.initial);
      return bounded(base + ".roundtrip", r.max(), tol.roundtrip, detail);
    });
    jobs.push_back([&, base, ne] {
      const PhasePoint start = to_phase_point(m, nic.ic);
      std::vector<double> x0 = even_bodies(nic.ic, ne, true), p0;
      for (int k = 0; k < ne; ++k) p0.push_back(start.momenta[k].body());
      const FlowState f = integrate_flow(m, start, model.t_end, model.dt);
      const BodyTrajectory b = integrate_body_flow(reduce_body(m), x0, p0, model.t_end, model.dt);
      return bounded(base + ".body", body_flow_deviation(f, b), tol.body);
    });
  }
}

void exp_jobs(const Model& model, std::vector<Job>& jobs) {
  const MetricChart& m = model.metric;
  const Tolerances& tol = model.tol;
  for (std::size_t g = 0; g < model.body_grid.size(); ++g) {
    const std::string base = "exp.jacobian[" + std::to_string(g) + "]";
    jobs.push_back([&, base, g] {
      const JacobianReport r = exp_jacobian_check(m, model.body_grid[g], 1e-4, model.dt);
      CheckItem item = bounded(base, r.deviation, tol.jacobian);
      if (r.odd_deviation > tol.jacobian_odd) {
        item.pass = false;
        item.detail = "odd block deviation " + format_double(r.odd_deviation);
      }
      return item;
    });
  }
}

std::vector<TangentFiberPoint> vectors_for(const Model& model, const NamedMorphism& nm, std::uint64_t seed) {
  std::vector<TangentFiberPoint> out;
  for (std::size_t b = 0; b < nm.bases.size(); ++b) {
    auto v = random_vectors(model.metric, nm.bases[b], model.L, kVectorsPerBase, seed + b, model.vector_scale);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void isometry_jobs(const Model& model, std::vector<Job>& jobs) {
  const MetricChart& m = model.metric;
  const Tolerances& tol = model.tol;
  for (std::size_t idx = 0; idx < model.morphisms.size(); ++idx) {
    const NamedMorphism& nm = model.morphisms[idx];
    const std::string base = "isometry." + nm.name;
    const std::uint64_t seed = 100 + 17 * idx;
    switch (nm.role) {
      case MorphismRole::isometry:
        jobs.push_back([&, base, seed] {
          const CheckReport r = isometry_check(m, m, nm.phi, samples(model, kSamplePoints, seed), tol.identity);
          return CheckItem{base + ".metric", r.deviation, tol.identity, r.pass, false, r.message};
        });
        jobs.push_back([&, base, seed] {
          const auto vs = vectors_for(model, nm, seed);
          const CheckReport r = naturality_check(m, nm.phi, vs, model.dt, tol.naturality);
          return CheckItem{base + ".naturality", r.deviation, tol.naturality, r.pass, false, r.message};
        });
        break;
      case MorphismRole::non_isometry:
        jobs.push_back([&, base, seed] {
          const CheckReport r = isometry_check(m, m, nm.phi, samples(model, kSamplePoints, seed), tol.identity);
          return CheckItem{base + ".rejected", r.deviation, tol.identity, !r.pass, true, r.message};
        });
        if (nm.breaks_naturality)
          jobs.push_back([&, base, seed] {
            return exceeding(base + ".naturality_breaks", naturality_deviation(m, nm.phi, vectors_for(model, nm, seed), model.dt),
                             tol.negative);
          });
        break;
      case MorphismRole::linearization:
        jobs.push_back([&, base, seed] {
          const auto r = linearization_test(m, nm.phi, samples(model, kSamplePoints, seed), vectors_for(model, nm, seed),
                                            model.dt, tol.naturality, nm.sign);
          const std::string got = to_string(r.status);
          return CheckItem{base + ".linearization", r.deviation, tol.naturality, got == nm.expect, false,
                           got + (r.message.empty() ? "" : ": " + r.message)};
        });
        break;
    }
  }
}

}  // namespace

VerifyReport run_verify(const Model& model, Suite suite, Execution ex) {
  std::vector<Job> jobs;
  auto want = [suite](Suite s) { return suite == Suite::all || suite == s; };
  if (want(Suite::metric)) metric_jobs(model, jobs);
  if (want(Suite::geodesic)) geodesic_jobs(model, jobs);
  if (want(Suite::flow)) flow_jobs(model, jobs);
  if (want(Suite::exp)) exp_jobs(model, jobs);
  if (want(Suite::isometry)) isometry_jobs(model, jobs);

  VerifyReport report{model.name, suite, std::vector<CheckItem>(jobs.size())};
  for_each_index(jobs.size(), ex, [&](std::size_t i) {
    try {
      report.items[i] = jobs[i]();
    } catch (const std::exception& e) {
      report.items[i] = CheckItem{"", kNaN, 0.0, false, false, e.what()};
    }
  });
  // Name failed items after the fact so the job list stays the single source.
  for (std::size_t i = 0; i < jobs.size(); ++i)
    if (report.items[i].name.empty()) report.items[i].name = "item[" + std::to_string(i) + "]";
  return report;
}

nlohmann::json to_json(const VerifyReport& r) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& c : r.items) {
    nlohmann::json j;
    j["name"] = c.name;
    j["max_deviation"] = std::isfinite(c.max_deviation) ? nlohmann::json(c.max_deviation) : nlohmann::json();
    j["tolerance"] = c.tolerance;
    j["pass"] = c.pass;
    if (c.must_exceed) j["must_exceed"] = true;
    if (!c.detail.empty()) j["detail"] = c.detail;
    items.push_back(std::move(j));
  }
  return {{"model", r.model}, {"suite", to_string(r.suite)}, {"pass", r.pass()}, {"items", std::move(items)}};
}

}  // namespace sgeo
