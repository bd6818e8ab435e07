#include <random>

#include "doctest.h"
#include "sgeo/batch.hpp"
#include "sgeo/error.hpp"
#include "support.hpp"

using namespace sgeo;
using namespace sgeo::test;

namespace {

std::vector<InitialCondition> ics(const MetricChart& m, int L, int count, double scale) {
  std::mt19937_64 rng(21);
  std::vector<InitialCondition> out;
  for (const auto& p : random_points(m, L, count, 21, 0.3)) {
    std::vector<Grassmann> v;
    for (int i = 0; i < m.dim(); ++i) {
      Grassmann g = random_element(rng, L, m.signature().is_odd(i) ? Kind::odd : Kind::even);
      g *= scale;
      v.push_back(g);
    }
    out.push_back({L, p, v});
  }
  return out;
}

bool same(const std::vector<Grassmann>& a, const std::vector<Grassmann>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("parallel batches reproduce the serial reference bit for bit") {
  const MetricChart m = theta_coupled();
  const auto pts = random_points(m, 3, 32, 5);
  const auto cs = batch_christoffel(m, pts, Execution::serial);
  const auto cp = batch_christoffel(m, pts, Execution::parallel);
  REQUIRE(cs.size() == pts.size());
  for (std::size_t n = 0; n < pts.size(); ++n)
    for (int k = 0; k < m.dim(); ++k)
      for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) REQUIRE(cs[n](k, i, j) == cp[n](k, i, j));

  const auto starts = ics(m, 3, 8, 0.4);
  const auto gs = batch_geodesics(m, starts, 0.5, 1e-2, Execution::serial);
  const auto gp = batch_geodesics(m, starts, 0.5, 1e-2, Execution::parallel);
  for (std::size_t n = 0; n < starts.size(); ++n) {
    REQUIRE(gs[n].samples.size() == gp[n].samples.size());
    for (std::size_t s = 0; s < gs[n].samples.size(); ++s) {
      REQUIRE(same(gs[n].samples[s].position, gp[n].samples[s].position));
      REQUIRE(same(gs[n].samples[s].velocity, gp[n].samples[s].velocity));
    }
    // and each item equals a standalone run
    const Trajectory one = integrate_geodesic(m, starts[n], 0.5, 1e-2);
    REQUIRE(same(one.samples.back().position, gp[n].samples.back().position));
  }

  std::vector<PhasePoint> phases;
  for (const auto& ic : starts) phases.push_back({ic.position, ic.velocity});
  const auto fs = batch_flows(m, phases, 0.5, 1e-2, Execution::serial);
  const auto fp = batch_flows(m, phases, 0.5, 1e-2, Execution::parallel);
  for (std::size_t n = 0; n < phases.size(); ++n) {
    REQUIRE(same(fs[n].samples.back().position, fp[n].samples.back().position));
    REQUIRE(same(fs[n].samples.back().momenta, fp[n].samples.back().momenta));
    REQUIRE(fs[n].samples.back().energy == fp[n].samples.back().energy);
  }

  std::vector<TangentFiberPoint> vs;
  for (const auto& ic : starts) {
    TangentFiberPoint v{{ic.position.values[0].body()}, 3, ic.velocity};
    vs.push_back(v);
  }
  const auto es = batch_exp(m, vs, 1e-2, Execution::serial);
  const auto ep = batch_exp(m, vs, 1e-2, Execution::parallel);
  for (std::size_t n = 0; n < vs.size(); ++n) REQUIRE(same(es[n].values, ep[n].values));
}

TEST_CASE("the lowest failing index is reported on both paths") {
  const MetricChart m = c_metric();
  auto starts = ics(m, 1, 6, 0.2);
  // Items 2 and 4 leave the chart; 2 must win regardless of scheduling.
  starts[2].velocity[0] = Grassmann(1, -40.0);
  starts[4].position.values[0] = Grassmann(1, 7.0);
  for (const Execution ex : {Execution::serial, Execution::parallel}) {
    std::string what;
    ErrorCode code = ErrorCode::InvalidArgument;
    try {
      batch_geodesics(m, starts, 1.0, 1e-2, ex);
    } catch (const Error& e) {
      what = e.what();
      code = e.code();
    }
    CHECK(code == ErrorCode::LeftDomain);
  }
  std::vector<int> hits(100, 0);
  for_each_index(hits.size(), Execution::parallel, [&](std::size_t i) { hits[i] += static_cast<int>(i); });
  for (std::size_t i = 0; i < hits.size(); ++i) REQUIRE(hits[i] == static_cast<int>(i));

  int first = -1;
  try {
    for_each_index(50, Execution::parallel, [](std::size_t i) {
      if (i % 7 == 3) throw Error(ErrorCode::InvalidArgument, std::to_string(i));
    });
  } catch (const Error& e) {
    first = std::stoi(std::string(e.what()).substr(std::string(e.what()).rfind(' ') + 1));
  }
  CHECK(first == 3);
}
