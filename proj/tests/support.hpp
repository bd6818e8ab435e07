#pragma once

#include <random>
#include <string>
#include <vector>

#include "sgeo/geometry.hpp"

namespace sgeo::test {

inline MetricChart make_metric(std::vector<std::string> even, std::vector<std::string> odd,
                               const std::vector<std::vector<std::string>>& rows, DomainBox box = {},
                               std::string id = "test") {
  ChartSignature sig(std::move(even), std::move(odd));
  std::vector<Expr> entries;
  for (const auto& r : rows)
    for (const auto& e : r) entries.push_back(parse_expr(e, sig));
  if (box.bounds.empty()) box = DomainBox::unbounded(sig.even_count());
  return MetricChart(sig, std::move(entries), std::move(box), std::move(id));
}

inline MetricChart flat_1_2() {
  return make_metric({"x"}, {"th1", "th2"}, {{"1", "0", "0"}, {"0", "0", "1"}, {"0", "-1", "0"}}, {}, "flat_1_2");
}

// g_xx = 1, g_{th1 th2} = -g_{th2 th1} = c(x) = 1 + x
inline MetricChart c_metric() {
  return make_metric({"x"}, {"th1", "th2"}, {{"1", "0", "0"}, {"0", "0", "1+x"}, {"0", "-(1+x)", "0"}},
                     DomainBox{{{-0.9, 4.0}}}, "c_metric");
}

inline MetricChart polar() {
  const double inf = std::numeric_limits<double>::infinity();
  return make_metric({"x", "y"}, {}, {{"1", "0"}, {"0", "x^2"}}, DomainBox{{{0.2, 5.0}, {-inf, inf}}}, "polar");
}

inline MetricChart theta_coupled() {
  return make_metric({"x"}, {"th1", "th2"},
                     {{"1 + th1*th2", "0", "0.3*th1"}, {"0", "0", "1 + x + th1*th2"}, {"0.3*th1", "-(1 + x + th1*th2)", "0"}},
                     DomainBox{{{-0.9, 4.0}}}, "theta_coupled");
}

inline MetricChart flat_2_2() {
  return make_metric({"x", "y"}, {"th1", "th2"},
                     {{"1", "0", "0", "0"}, {"0", "1", "0", "0"}, {"0", "0", "0", "1"}, {"0", "0", "-1", "0"}}, {},
                     "flat_2_2");
}

inline std::vector<MetricChart> curved_metrics() { return {c_metric(), polar(), theta_coupled()}; }

// Random element with coefficients in [-1, 1]; `odd`/`even` restricts to
// masks of that parity, `body` overrides the empty-mask coefficient.
enum class Kind { even, odd, any };

inline Grassmann random_element(std::mt19937_64& rng, int L, Kind kind, double body = NAN) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Grassmann g(L);
  for (Grassmann::Mask m = 0; m < g.basis_size(); ++m) {
    const bool odd = mask_is_odd(m);
    if ((kind == Kind::even && odd) || (kind == Kind::odd && !odd)) continue;
    g.set(m, u(rng));
  }
  if (!std::isnan(body) && kind != Kind::odd) g.set(0, body);
  return g;
}

inline Grassmann gen(int L, int one_based) { return Grassmann::generator(L, one_based - 1); }

}  // namespace sgeo::test
