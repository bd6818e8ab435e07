#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sgeo/error.hpp"
#include "sgeo/grassmann.hpp"

namespace sgeo {

namespace detail {

inline void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline void axpy(std::vector<Grassmann>& y, double a, const std::vector<Grassmann>& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i].axpy(a, x[i]);
}

}  // namespace detail

// One classical fourth-order Runge-Kutta step of the autonomous system y' = f(y).
// Works on real vectors and on Grassmann-valued vectors alike; the latter is
// the same scheme applied to every coefficient of the expanded real system.
template <class Vec, class Rhs>
Vec rk4_step(const Rhs& f, const Vec& y, double h) {
  const Vec k1 = f(y);
  Vec y2 = y;
  detail::axpy(y2, 0.5 * h, k1);
  const Vec k2 = f(y2);
  Vec y3 = y;
  detail::axpy(y3, 0.5 * h, k2);
  const Vec k3 = f(y3);
  Vec y4 = y;
  detail::axpy(y4, h, k3);
  const Vec k4 = f(y4);
  Vec out = y;
  detail::axpy(out, h / 6.0, k1);
  detail::axpy(out, h / 3.0, k2);
  detail::axpy(out, h / 3.0, k3);
  detail::axpy(out, h / 6.0, k4);
  return out;
}

// Fixed-step grid on [0, t_end]: the number of steps is ceil(t_end / dt) and
// the step is shrunk so the grid ends exactly at t_end.
struct StepGrid {
  long steps = 0;
  double h = 0.0;

  StepGrid(double t_end, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
      throw Error(ErrorCode::InvalidArgument, "t_end must be non-negative");
    steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    h = steps > 0 ? t_end / static_cast<double>(steps) : dt;
  }
  double time(long i) const { return static_cast<double>(i) * h; }
};

}  // namespace sgeo
