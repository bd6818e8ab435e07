#pragma once

#include <cstddef>
#include <exception>
#include <span>
#include <type_traits>
#include <vector>

#include "sgeo/cotangent.hpp"
#include "sgeo/expmap.hpp"

namespace sgeo {

// serial is the reference path; parallel spreads independent items over
// OpenMP threads (identical results, since every item is computed alone).
enum class Execution { serial, parallel };

bool parallel_available() noexcept;

// Runs f(i) for i in [0, n). Exceptions are caught per item; the one with the
// lowest index is rethrown after the loop so both paths fail the same way.
void for_each_index(std::size_t n, Execution ex, void (*fn)(std::size_t, void*), void* ctx);

template <class F>
void for_each_index(std::size_t n, Execution ex, F&& f) {
  for_each_index(
      n, ex, [](std::size_t i, void* c) { (*static_cast<std::remove_reference_t<F>*>(c))(i); },
      static_cast<void*>(&f));
}

std::vector<ChristoffelTable> batch_christoffel(const MetricChart& m, std::span<const SuperPoint> points,
                                                Execution ex);

std::vector<Trajectory> batch_geodesics(const MetricChart& m, std::span<const InitialCondition> ics, double t_end,
                                        double dt, Execution ex);

std::vector<FlowState> batch_flows(const MetricChart& m, std::span<const PhasePoint> starts, double t_end, double dt,
                                   Execution ex);

std::vector<SuperPoint> batch_exp(const MetricChart& m, std::span<const TangentFiberPoint> vectors, double dt,
                                  Execution ex);

}  // namespace sgeo
