#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sgeo/expr.hpp"
#include "sgeo/grassmann.hpp"

namespace sgeo {

// Square matrix with Grassmann entries, row-major.
class SuperMatrix {
 public:
  SuperMatrix() = default;
  SuperMatrix(int n, int L) : n_(n), data_(static_cast<std::size_t>(n) * n, Grassmann(L)) {}

  int size() const noexcept { return n_; }
  Grassmann& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n_ + j]; }
  const Grassmann& operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n_ + j]; }

  Eigen::MatrixXd body() const;
  friend SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b);

 private:
  int n_ = 0;
  std::vector<Grassmann> data_;
};

// Open box on the bodies of the even coordinates.
struct DomainBox {
  std::vector<std::pair<double, double>> bounds;

  static DomainBox unbounded(int even_count) {
    const double inf = std::numeric_limits<double>::infinity();
    return DomainBox{std::vector<std::pair<double, double>>(static_cast<std::size_t>(even_count), {-inf, inf})};
  }
  bool contains(std::span<const double> even_bodies) const;
};

// Chart of dimension m|n with a graded metric g_ij given symbolically.
// First partials d_l g_ij are derived once at construction.
class MetricChart {
 public:
  MetricChart(ChartSignature sig, std::vector<Expr> entries, DomainBox domain, std::string id = {});

  const ChartSignature& signature() const noexcept { return sig_; }
  int dim() const noexcept { return sig_.size(); }
  const DomainBox& domain() const noexcept { return domain_; }
  const std::string& id() const noexcept { return id_; }

  const Expr& entry(int i, int j) const { return g_[index(i, j)]; }
  // d_{q_l} g_ij
  const Expr& entry_partial(int l, int i, int j) const {
    return dg_[static_cast<std::size_t>(l) * g_.size() + index(i, j)];
  }
  bool is_constant() const noexcept { return constant_; }

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * dim() + j; }

  ChartSignature sig_;
  std::vector<Expr> g_;
  std::vector<Expr> dg_;
  DomainBox domain_;
  std::string id_;
  bool constant_ = true;
};

// Throws InvalidPoint when p is malformed or its body leaves the domain.
void require_valid_point(const MetricChart& m, const SuperPoint& p);

// Evaluated g_ij at p (no validation).
SuperMatrix metric_at(const MetricChart& m, const SuperPoint& p);

struct MetricValidation {
  bool ok = true;
  std::string failure;  // first violated invariant
};

// Checks entry parities, graded symmetry and body-block nondegeneracy at the
// sample points. Report-valued; never throws for a bad metric.
MetricValidation metric_validate(const MetricChart& m, std::span<const SuperPoint> samples, double tol = 1e-10);

// g^{ij} with sum_k g^{ik} g_kj = delta_ij, exact over Lambda_L: numeric
// inverse of the body matrix, then the terminating series in the nilpotent
// remainder. Throws SingularBody, InvalidPoint.
SuperMatrix metric_inverse_at(const MetricChart& m, const SuperPoint& p);

// Gamma^k_ij at a point, stored [k][i][j].
class ChristoffelTable {
 public:
  ChristoffelTable() = default;
  ChristoffelTable(int n, int L) : n_(n), data_(static_cast<std::size_t>(n) * n * n, Grassmann(L)) {}

  int size() const noexcept { return n_; }
  Grassmann& operator()(int k, int i, int j) { return data_[(static_cast<std::size_t>(k) * n_ + i) * n_ + j]; }
  const Grassmann& operator()(int k, int i, int j) const {
    return data_[(static_cast<std::size_t>(k) * n_ + i) * n_ + j];
  }
  bool is_zero(int k, int i, int j) const { return (*this)(k, i, j).is_zero(); }

 private:
  int n_ = 0;
  std::vector<Grassmann> data_;
};

// Gamma^k_ij = 1/2 sum_l [d_i g_jl + (-1)^{|i||j|} d_j g_il
//                         - (-1)^{|l|(|i|+|j|)} d_l g_ij] g^{lk}
// with left odd derivatives, factors in this order.
ChristoffelTable christoffel_at(const MetricChart& m, const SuperPoint& p);

// Same, reusing an already computed inverse.
ChristoffelTable christoffel_at(const MetricChart& m, const SuperPoint& p, const SuperMatrix& inverse);

// Classical metric on the body: even-even block with odd coordinates and
// nilpotents set to zero. Evaluated with plain doubles and Eigen, independent
// of the Grassmann code path.
class BodyMetric {
 public:
  explicit BodyMetric(const MetricChart& m);

  int dim() const noexcept { return dim_; }
  Eigen::MatrixXd metric(std::span<const double> x) const;
  // d_l g for every l, as dim matrices.
  std::vector<Eigen::MatrixXd> metric_partials(std::span<const double> x) const;
  // Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij), stored [k][i][j].
  std::vector<double> christoffel(std::span<const double> x) const;
  const Expr& entry(int i, int j) const { return g_[static_cast<std::size_t>(i) * dim_ + j]; }

 private:
  int dim_;
  std::vector<Expr> g_;
  std::vector<Expr> dg_;
};

BodyMetric reduce_body(const MetricChart& m);

// Random parity-correct points whose bodies lie well inside the domain.
// Infinite bounds are replaced by [-1, 1].
std::vector<SuperPoint> random_points(const MetricChart& m, int L, int count, std::uint64_t seed,
                                      double soul_scale = 0.5);

}  // namespace sgeo
