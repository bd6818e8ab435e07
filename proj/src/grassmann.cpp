#include "sgeo/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sgeo/error.hpp"

namespace sgeo {

const char* to_string(Parity p) noexcept {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::nonhomogeneous: return "nonhomogeneous";
  }
  return "?";
}

int basis_product_sign(Grassmann::Mask a, Grassmann::Mask b) noexcept {
  if ((a & b) != 0) return 0;
  // Moving each generator of b leftwards past the larger generators of a.
  unsigned swaps = 0;
  for (Grassmann::Mask rest = b; rest != 0; rest &= rest - 1) {
    const int bit = __builtin_ctz(rest);
    swaps += static_cast<unsigned>(__builtin_popcount(a >> (bit + 1)));
  }
  return (swaps & 1U) ? -1 : 1;
}

Grassmann::Grassmann(int generators, double body) : generators_(generators) {
  if (generators < 0 || generators > kMaxGenerators)
    throw Error(ErrorCode::TooManyGenerators,
                "generator count " + std::to_string(generators) + " outside [0, " +
                    std::to_string(kMaxGenerators) + "]");
  if (is_dense()) {
    dense_.assign(std::size_t{1} << generators, 0.0);
    dense_[0] = body;
  } else if (body != 0.0) {
    sparse_[0] = body;
  }
}

Grassmann Grassmann::generator(int generators, int index) {
  if (index < 0 || index >= generators)
    throw Error(ErrorCode::InvalidArgument, "generator index out of range");
  Grassmann g(generators);
  g.set(Mask{1} << index, 1.0);
  return g;
}

Grassmann Grassmann::from_terms(int generators, std::span<const std::pair<Mask, double>> terms) {
  Grassmann g(generators);
  for (const auto& [m, c] : terms) g.add(m, c);
  return g;
}

double Grassmann::coeff(Mask mask) const {
  if (mask >= basis_size()) return 0.0;
  if (is_dense()) return dense_[mask];
  auto it = sparse_.find(mask);
  return it == sparse_.end() ? 0.0 : it->second;
}

void Grassmann::set(Mask mask, double value) {
  if (mask >= basis_size())
    throw Error(ErrorCode::InvalidArgument, "mask uses a generator beyond L");
  if (is_dense()) {
    dense_[mask] = value;
  } else if (value == 0.0) {
    sparse_.erase(mask);
  } else {
    sparse_[mask] = value;
  }
}

void Grassmann::add(Mask mask, double value) {
  if (value == 0.0) return;
  if (mask >= basis_size())
    throw Error(ErrorCode::InvalidArgument, "mask uses a generator beyond L");
  if (is_dense()) {
    dense_[mask] += value;
  } else {
    double& c = sparse_[mask];
    c += value;
    if (c == 0.0) sparse_.erase(mask);
  }
}

std::vector<std::pair<Grassmann::Mask, double>> Grassmann::terms() const {
  std::vector<std::pair<Mask, double>> out;
  for_each_term([&](Mask m, double c) { out.emplace_back(m, c); });
  return out;
}

Grassmann Grassmann::soul() const {
  Grassmann s = *this;
  s.set(0, 0.0);
  return s;
}

Parity Grassmann::parity() const {
  bool has_even = false, has_odd = false;
  for_each_term([&](Mask m, double) { (mask_is_odd(m) ? has_odd : has_even) = true; });
  if (has_even && has_odd) return Parity::nonhomogeneous;
  return has_odd ? Parity::odd : Parity::even;
}

bool Grassmann::is_odd() const { return parity() == Parity::odd || is_zero(); }

bool Grassmann::is_zero() const {
  bool any = false;
  for_each_term([&](Mask, double) { any = true; });
  return !any;
}

double Grassmann::max_abs() const {
  double m = 0.0;
  for_each_term([&](Mask, double c) { m = std::max(m, std::abs(c)); });
  return m;
}

void Grassmann::check_same_algebra(const Grassmann& other) const {
  if (other.generators_ != generators_)
    throw Error(ErrorCode::MismatchedGeneratorCount,
                "L=" + std::to_string(generators_) + " vs L=" + std::to_string(other.generators_));
}

Grassmann& Grassmann::operator+=(const Grassmann& rhs) { return axpy(1.0, rhs); }

Grassmann& Grassmann::operator-=(const Grassmann& rhs) { return axpy(-1.0, rhs); }

Grassmann& Grassmann::axpy(double s, const Grassmann& x) {
  check_same_algebra(x);
  if (is_dense()) {
    for (std::size_t i = 0; i < dense_.size(); ++i) dense_[i] += s * x.dense_[i];
  } else {
    x.for_each_term([&](Mask m, double c) { add(m, s * c); });
  }
  return *this;
}

Grassmann& Grassmann::operator*=(double s) {
  if (is_dense()) {
    for (double& c : dense_) c *= s;
  } else if (s == 0.0) {
    sparse_.clear();
  } else {
    for (auto& [m, c] : sparse_) c *= s;
  }
  return *this;
}

Grassmann operator*(const Grassmann& a, const Grassmann& b) {
  a.check_same_algebra(b);
  Grassmann r(a.generators_);
  if (a.is_dense()) {
    const auto n = static_cast<Grassmann::Mask>(a.dense_.size());
    for (Grassmann::Mask i = 0; i < n; ++i) {
      const double ai = a.dense_[i];
      if (ai == 0.0) continue;
      for (Grassmann::Mask j = 0; j < n; ++j) {
        const double bj = b.dense_[j];
        if (bj == 0.0 || (i & j) != 0) continue;
        r.dense_[i | j] += basis_product_sign(i, j) * ai * bj;
      }
    }
  } else {
    for (const auto& [i, ai] : a.sparse_)
      for (const auto& [j, bj] : b.sparse_)
        if ((i & j) == 0) r.add(i | j, basis_product_sign(i, j) * ai * bj);
  }
  return r;
}

Grassmann Grassmann::inverse() const {
  // Nilpotent elements (odd ones included) fail on the body first.
  const double b = body();
  if (b == 0.0) throw Error(ErrorCode::ZeroBody, "element with zero body is not invertible");
  if (parity() != Parity::even)
    throw Error(ErrorCode::OddElement, "only even elements are inverted");
  // x = -soul/b is nilpotent of order <= floor(L/2) + 1.
  Grassmann x = soul();
  x *= -1.0 / b;
  Grassmann term(generators_, 1.0);
  Grassmann sum(generators_, 1.0);
  for (int k = 1; k <= generators_ / 2; ++k) {
    term = term * x;
    if (term.is_zero()) break;
    sum += term;
  }
  sum *= 1.0 / b;
  return sum;
}

Grassmann Grassmann::left_derivative(int index) const {
  if (index < 0 || index >= generators_)
    throw Error(ErrorCode::InvalidArgument, "generator index out of range");
  const Mask bit = Mask{1} << index;
  Grassmann r(generators_);
  for_each_term([&](Mask m, double c) {
    if ((m & bit) == 0) return;
    // Generators below `index` have to be passed to bring it to the front.
    const int passed = __builtin_popcount(m & (bit - 1));
    r.add(m & ~bit, (passed & 1) ? -c : c);
  });
  return r;
}

bool Grassmann::approx_equal(const Grassmann& other, double tol) const {
  if (other.generators_ != generators_) return false;
  return max_abs_diff(*this, other) <= tol;
}

std::string Grassmann::to_string(int precision) const {
  std::string out;
  char buf[64];
  for_each_term([&](Mask m, double c) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, std::abs(c));
    if (out.empty()) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    out += buf;
    for (int k = 0; k < generators_; ++k)
      if (m & (Mask{1} << k)) {
        out += (m & ((Mask{1} << k) - 1)) ? "^t" : "*t";
        out += std::to_string(k + 1);
      }
  });
  return out.empty() ? "0" : out;
}

std::pair<double, Grassmann> body_soul(const Grassmann& a) { return {a.body(), a.soul()}; }

double max_abs_diff(const Grassmann& a, const Grassmann& b) {
  if (a.generators() != b.generators())
    throw Error(ErrorCode::MismatchedGeneratorCount, "comparing elements of different algebras");
  double m = 0.0;
  a.for_each_term([&](Grassmann::Mask k, double c) { m = std::max(m, std::abs(c - b.coeff(k))); });
  b.for_each_term([&](Grassmann::Mask k, double c) {
    if (a.coeff(k) == 0.0) m = std::max(m, std::abs(c));
  });
  return m;
}

Grassmann apply_taylor(const Grassmann& arg, std::span<const double> derivatives) {
  const int L = arg.generators();
  Grassmann result(L, derivatives.empty() ? 0.0 : derivatives[0]);
  const Grassmann s = arg.soul();
  if (derivatives.size() < 2 || s.is_zero()) return result;
  Grassmann power(L, 1.0);
  double factorial = 1.0;
  const std::size_t order = std::min<std::size_t>(derivatives.size() - 1, L / 2);
  for (std::size_t k = 1; k <= order; ++k) {
    power = power * s;
    factorial *= static_cast<double>(k);
    if (power.is_zero()) break;
    result.axpy(derivatives[k] / factorial, power);
  }
  return result;
}

nlohmann::json to_json(const Grassmann& a) {
  nlohmann::json j = nlohmann::json::array();
  a.for_each_term([&](Grassmann::Mask m, double c) { j.push_back({m, c}); });
  return j;
}

Grassmann grassmann_from_json(const nlohmann::json& j, int generators) {
  if (j.is_number()) return Grassmann(generators, j.get<double>());
  if (!j.is_array())
    throw Error(ErrorCode::ModelError, "Grassmann value must be a number or [[mask, coeff], ...]");
  Grassmann g(generators);
  for (const auto& term : j) {
    if (!term.is_array() || term.size() != 2 || !term[1].is_number() ||
        !(term[0].is_number_unsigned() || term[0].is_string()))
      throw Error(ErrorCode::ModelError, "Grassmann term must be [mask, coeff]");
    Grassmann::Mask mask = 0;
    if (term[0].is_string()) {
      // Bit string as in the CSV output: character j stands for generator j+1.
      const auto bits = term[0].get<std::string>();
      if (static_cast<int>(bits.size()) != generators || bits.find_first_not_of("01") != std::string::npos)
        throw Error(ErrorCode::ModelError, "mask string '" + bits + "' needs L=" + std::to_string(generators) +
                                               " characters of 0/1");
      for (std::size_t c = 0; c < bits.size(); ++c)
        if (bits[c] == '1') mask |= Grassmann::Mask{1} << c;
    } else {
      mask = term[0].get<Grassmann::Mask>();
    }
    if (mask >= g.basis_size())
      throw Error(ErrorCode::ModelError, "mask " + std::to_string(mask) + " exceeds L=" +
                                             std::to_string(generators));
    g.add(mask, term[1].get<double>());
  }
  return g;
}

}  // namespace sgeo
