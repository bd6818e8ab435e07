#include "sgeo/batch.hpp"

#ifdef SGEO_HAVE_OPENMP
#include <omp.h>
#endif

namespace sgeo {

bool parallel_available() noexcept {
#ifdef SGEO_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

void for_each_index(std::size_t n, Execution ex, void (*fn)(std::size_t, void*), void* ctx) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
  if (ex == Execution::parallel) {
#ifdef SGEO_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i), ctx);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < count; ++i) {
      try {
        fn(static_cast<std::size_t>(i), ctx);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<ChristoffelTable> batch_christoffel(const MetricChart& m, std::span<const SuperPoint> points,
                                                Execution ex) {
  std::vector<ChristoffelTable> out(points.size());
  for_each_index(points.size(), ex, [&](std::size_t i) { out[i] = christoffel_at(m, points[i]); });
  return out;
}

std::vector<Trajectory> batch_geodesics(const MetricChart& m, std::span<const InitialCondition> ics, double t_end,
                                        double dt, Execution ex) {
  std::vector<Trajectory> out(ics.size());
  for_each_index(ics.size(), ex, [&](std::size_t i) { out[i] = integrate_geodesic(m, ics[i], t_end, dt); });
  return out;
}

std::vector<FlowState> batch_flows(const MetricChart& m, std::span<const PhasePoint> starts, double t_end, double dt,
                                   Execution ex) {
  std::vector<FlowState> out(starts.size());
  for_each_index(starts.size(), ex, [&](std::size_t i) { out[i] = integrate_flow(m, starts[i], t_end, dt); });
  return out;
}

std::vector<SuperPoint> batch_exp(const MetricChart& m, std::span<const TangentFiberPoint> vectors, double dt,
                                  Execution ex) {
  std::vector<SuperPoint> out(vectors.size());
  for_each_index(vectors.size(), ex, [&](std::size_t i) { out[i] = exp_at(m, vectors[i], dt); });
  return out;
}

}  // namespace sgeo
