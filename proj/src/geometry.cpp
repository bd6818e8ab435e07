#include "sgeo/geometry.hpp"

#include <cmath>
#include <random>

#include "sgeo/error.hpp"

namespace sgeo {

Eigen::MatrixXd SuperMatrix::body() const {
  Eigen::MatrixXd b(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) b(i, j) = (*this)(i, j).body();
  return b;
}

SuperMatrix operator*(const SuperMatrix& a, const SuperMatrix& b) {
  const int n = a.size();
  const int L = n > 0 ? a(0, 0).generators() : 0;
  SuperMatrix r(n, L);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a(i, k).is_zero()) continue;
      for (int j = 0; j < n; ++j)
        if (!b(k, j).is_zero()) r(i, j) += a(i, k) * b(k, j);
    }
  return r;
}

bool DomainBox::contains(std::span<const double> even_bodies) const {
  for (std::size_t i = 0; i < bounds.size() && i < even_bodies.size(); ++i) {
    const double x = even_bodies[i];
    if (!(x > bounds[i].first && x < bounds[i].second)) return false;
  }
  return true;
}

MetricChart::MetricChart(ChartSignature sig, std::vector<Expr> entries, DomainBox domain, std::string id)
    : sig_(std::move(sig)), g_(std::move(entries)), domain_(std::move(domain)), id_(std::move(id)) {
  const int n = dim();
  if (g_.size() != static_cast<std::size_t>(n) * n)
    throw Error(ErrorCode::ModelError, "metric must be " + std::to_string(n) + "x" + std::to_string(n));
  if (static_cast<int>(domain_.bounds.size()) != sig_.even_count())
    throw Error(ErrorCode::ModelError, "domain needs one interval per even coordinate");
  dg_.reserve(static_cast<std::size_t>(n) * g_.size());
  for (int l = 0; l < n; ++l)
    for (const auto& e : g_) {
      dg_.push_back(partial(e, l, sig_.is_odd(l)));
      if (!dg_.back().is_zero()) constant_ = false;
    }
}

void require_valid_point(const MetricChart& m, const SuperPoint& p) {
  try {
    validate_point(m.signature(), p);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidPoint, e.what());
  }
  const auto body = p.body();
  if (!m.domain().contains(body)) throw Error(ErrorCode::InvalidPoint, "point body outside the chart domain");
}

SuperMatrix metric_at(const MetricChart& m, const SuperPoint& p) {
  const int n = m.dim();
  SuperMatrix g(n, p.L);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!m.entry(i, j).is_zero()) g(i, j) = evaluate(m.entry(i, j), p.values, p.L);
  return g;
}

namespace {

int sign_of(int parity_sum) { return (parity_sum & 1) ? -1 : 1; }

// Nonzero determinant with a scale-aware threshold.
bool nondegenerate(const Eigen::MatrixXd& b) {
  if (b.rows() == 0) return true;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  lu.setThreshold(1e-12);
  return lu.isInvertible();
}

}  // namespace

MetricValidation metric_validate(const MetricChart& m, std::span<const SuperPoint> samples, double tol) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  const int ne = sig.even_count();
  const int no = sig.odd_count();
  auto fail = [](std::string msg) { return MetricValidation{false, std::move(msg)}; };

  if (no % 2 != 0)
    return fail("odd dimension " + std::to_string(no) + " is odd; an antisymmetric odd-odd block is degenerate");

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Expr& e = m.entry(i, j);
      const Parity want = ((sig.parity_bit(i) + sig.parity_bit(j)) & 1) ? Parity::odd : Parity::even;
      if (!e.is_zero() && e.parity() != want)
        return fail("g_" + sig.name(i) + sig.name(j) + " must be " + to_string(want));
    }

  for (const SuperPoint& p : samples) {
    try {
      require_valid_point(m, p);
    } catch (const Error& e) {
      return fail(std::string("sample point rejected: ") + e.what());
    }
    SuperMatrix g;
    try {
      g = metric_at(m, p);
    } catch (const Error& e) {
      return fail(std::string("metric not evaluable: ") + e.what());
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Parity want = ((sig.parity_bit(i) + sig.parity_bit(j)) & 1) ? Parity::odd : Parity::even;
        const Grassmann& v = g(i, j);
        if (!v.is_zero() && v.parity() != want)
          return fail("g_" + sig.name(i) + sig.name(j) + " evaluates to a non-" + to_string(want) + " value");
        const Grassmann mirrored = static_cast<double>(sign_of(sig.parity_bit(i) * sig.parity_bit(j))) * g(j, i);
        if (max_abs_diff(v, mirrored) > tol)
          return fail("graded symmetry g_ij = (-1)^{|i||j|} g_ji violated at (" + sig.name(i) + ", " +
                      sig.name(j) + ")");
      }
    const Eigen::MatrixXd b = g.body();
    const Eigen::MatrixXd even_block = b.topLeftCorner(ne, ne);
    const Eigen::MatrixXd odd_block = b.bottomRightCorner(no, no);
    if ((even_block - even_block.transpose()).cwiseAbs().maxCoeff() > tol && ne > 0)
      return fail("even-even body block is not symmetric");
    if (no > 0 && (odd_block + odd_block.transpose()).cwiseAbs().maxCoeff() > tol)
      return fail("odd-odd body block is not antisymmetric");
    if (!nondegenerate(even_block)) return fail("even-even body block is degenerate");
    if (!nondegenerate(odd_block)) return fail("odd-odd body block is degenerate");
  }
  return {};
}

SuperMatrix metric_inverse_at(const MetricChart& m, const SuperPoint& p) {
  require_valid_point(m, p);
  const int n = m.dim();
  const int L = p.L;
  const SuperMatrix g = metric_at(m, p);
  const Eigen::MatrixXd b = g.body();
  if (!nondegenerate(b)) throw Error(ErrorCode::SingularBody, "body of the metric is singular");
  const Eigen::MatrixXd binv = b.inverse();

  SuperMatrix binv_s(n, L);
  // -B^{-1} S where S = g - body(g) is the nilpotent part.
  SuperMatrix minus_t(n, L);
  bool has_soul = false;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      binv_s(i, j) = Grassmann(L, binv(i, j));
      for (int k = 0; k < n; ++k) {
        if (binv(i, k) == 0.0) continue;
        const Grassmann s = g(k, j).soul();
        if (s.is_zero()) continue;
        minus_t(i, j).axpy(-binv(i, k), s);
        has_soul = true;
      }
    }
  SuperMatrix sum = binv_s;
  if (!has_soul) return sum;
  SuperMatrix term = binv_s;
  for (int k = 1; k <= L; ++k) {
    term = minus_t * term;
    bool zero = true;
    for (int i = 0; i < n && zero; ++i)
      for (int j = 0; j < n && zero; ++j) zero = term(i, j).is_zero();
    if (zero) break;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sum(i, j) += term(i, j);
  }
  return sum;
}

ChristoffelTable christoffel_at(const MetricChart& m, const SuperPoint& p) {
  const SuperMatrix inv = metric_inverse_at(m, p);
  return christoffel_at(m, p, inv);
}

ChristoffelTable christoffel_at(const MetricChart& m, const SuperPoint& p, const SuperMatrix& inv) {
  const ChartSignature& sig = m.signature();
  const int n = m.dim();
  const int L = p.L;
  ChristoffelTable gamma(n, L);
  if (m.is_constant()) return gamma;

  // d[a][b][c] = d_a g_bc evaluated at p.
  std::vector<Grassmann> d(static_cast<std::size_t>(n) * n * n, Grassmann(L));
  std::vector<char> dz(d.size(), 1);
  auto at = [n](int a, int b, int c) { return (static_cast<std::size_t>(a) * n + b) * n + c; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const Expr& e = m.entry_partial(a, b, c);
        if (e.is_zero()) continue;
        d[at(a, b, c)] = evaluate(e, p.values, L);
        dz[at(a, b, c)] = 0;
      }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int pi = sig.parity_bit(i), pj = sig.parity_bit(j);
      for (int l = 0; l < n; ++l) {
        const int pl = sig.parity_bit(l);
        Grassmann bracket(L);
        bool any = false;
        if (!dz[at(i, j, l)]) {
          bracket += d[at(i, j, l)];
          any = true;
        }
        if (!dz[at(j, i, l)]) {
          bracket.axpy(sign_of(pi * pj), d[at(j, i, l)]);
          any = true;
        }
        if (!dz[at(l, i, j)]) {
          bracket.axpy(-sign_of(pl * (pi + pj)), d[at(l, i, j)]);
          any = true;
        }
        if (!any || bracket.is_zero()) continue;
        for (int k = 0; k < n; ++k) {
          if (inv(l, k).is_zero()) continue;
          gamma(k, i, j).axpy(0.5, bracket * inv(l, k));
        }
      }
    }
  return gamma;
}

BodyMetric::BodyMetric(const MetricChart& m) : dim_(m.signature().even_count()) {
  const ChartSignature& sig = m.signature();
  std::vector<Expr> zero_odd;
  for (int i = 0; i < sig.size(); ++i)
    zero_odd.push_back(sig.is_odd(i) ? Expr::constant(0.0) : Expr::variable(i, false));
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g_.push_back(substitute(m.entry(i, j), zero_odd));
  for (int l = 0; l < dim_; ++l)
    for (const auto& e : g_) dg_.push_back(partial(e, l, false));
}

Eigen::MatrixXd BodyMetric::metric(std::span<const double> x) const {
  Eigen::MatrixXd g(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) g(i, j) = evaluate_real(g_[static_cast<std::size_t>(i) * dim_ + j], x);
  return g;
}

std::vector<Eigen::MatrixXd> BodyMetric::metric_partials(std::span<const double> x) const {
  std::vector<Eigen::MatrixXd> out;
  const std::size_t block = static_cast<std::size_t>(dim_) * dim_;
  for (int l = 0; l < dim_; ++l) {
    Eigen::MatrixXd d(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        d(i, j) = evaluate_real(dg_[l * block + static_cast<std::size_t>(i) * dim_ + j], x);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<double> BodyMetric::christoffel(std::span<const double> x) const {
  const Eigen::MatrixXd ginv = metric(x).inverse();
  const auto dg = metric_partials(x);
  const int n = dim_;
  std::vector<double> gamma(static_cast<std::size_t>(n) * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[(static_cast<std::size_t>(k) * n + i) * n + j] = 0.5 * s;
      }
  return gamma;
}

BodyMetric reduce_body(const MetricChart& m) { return BodyMetric(m); }

std::vector<SuperPoint> random_points(const MetricChart& m, int L, int count, std::uint64_t seed,
                                      double soul_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ChartSignature& sig = m.signature();
  std::vector<SuperPoint> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    SuperPoint p;
    p.L = L;
    for (int i = 0; i < sig.size(); ++i) {
      Grassmann v(L);
      if (!sig.is_odd(i)) {
        auto [lo, hi] = m.domain().bounds[static_cast<std::size_t>(i)];
        if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 2.0 : -1.0;
        if (!std::isfinite(hi)) hi = lo + 2.0;
        v.set(0, lo + (0.2 + 0.6 * unit(rng)) * (hi - lo));
      }
      for (Grassmann::Mask mask = 1; mask < v.basis_size(); ++mask)
        if (mask_is_odd(mask) == sig.is_odd(i)) v.set(mask, soul_scale * (2.0 * unit(rng) - 1.0));
      p.values.push_back(std::move(v));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace sgeo
