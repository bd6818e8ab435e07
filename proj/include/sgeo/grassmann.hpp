#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sgeo {

enum class Parity { even, odd, nonhomogeneous };

const char* to_string(Parity p) noexcept;

// Element of the real Grassmann algebra on L anticommuting generators.
//
// Basis monomials are strictly increasing products of generators, encoded as
// L-bit masks: bit k set means generator k+1 is a factor. Mask 0 is the body.
// Storage is a dense 2^L vector for L <= kDenseLimit and an ordered sparse map
// above that; the public surface does not depend on which one is in use.
class Grassmann {
 public:
  using Mask = std::uint32_t;

  static constexpr int kMaxGenerators = 12;
  static constexpr int kDenseLimit = 8;

  Grassmann() : Grassmann(0, 0.0) {}
  explicit Grassmann(int generators, double body = 0.0);

  static Grassmann generator(int generators, int index);
  static Grassmann from_terms(int generators, std::span<const std::pair<Mask, double>> terms);

  int generators() const noexcept { return generators_; }
  Mask basis_size() const noexcept { return Mask{1} << generators_; }
  bool is_dense() const noexcept { return generators_ <= kDenseLimit; }

  double coeff(Mask mask) const;
  void set(Mask mask, double value);
  void add(Mask mask, double value);

  // Calls f(mask, coeff) for every stored nonzero coefficient in mask order.
  template <class F>
  void for_each_term(F&& f) const {
    if (is_dense()) {
      for (Mask m = 0; m < dense_.size(); ++m)
        if (dense_[m] != 0.0) f(m, dense_[m]);
    } else {
      for (const auto& [m, c] : sparse_)
        if (c != 0.0) f(m, c);
    }
  }

  std::vector<std::pair<Mask, double>> terms() const;

  double body() const { return coeff(0); }
  Grassmann soul() const;
  Parity parity() const;
  bool is_zero() const;
  bool is_even() const { return parity() == Parity::even; }
  bool is_odd() const;

  // Largest absolute coefficient.
  double max_abs() const;

  Grassmann& operator+=(const Grassmann& rhs);
  Grassmann& operator-=(const Grassmann& rhs);
  Grassmann& operator*=(double s);
  Grassmann& operator*=(const Grassmann& rhs) { return *this = *this * rhs; }

  // this += s * x, without a temporary.
  Grassmann& axpy(double s, const Grassmann& x);

  friend Grassmann operator+(Grassmann a, const Grassmann& b) { return a += b; }
  friend Grassmann operator-(Grassmann a, const Grassmann& b) { return a -= b; }
  friend Grassmann operator*(Grassmann a, double s) { return a *= s; }
  friend Grassmann operator*(double s, Grassmann a) { return a *= s; }
  friend Grassmann operator-(Grassmann a) { return a *= -1.0; }
  friend Grassmann operator*(const Grassmann& a, const Grassmann& b);

  // Inverse of an even element with nonzero body, by the terminating series
  // (b + s)^-1 = sum_k (-s/b)^k / b. Throws ZeroBody when b = 0 (every odd
  // element included), OddElement for a non-even element with b != 0.
  Grassmann inverse() const;

  // Left derivative by generator `index`: strips the generator after moving it
  // to the front, d/dtheta_i (theta_i * rest) = rest.
  Grassmann left_derivative(int index) const;

  // Coefficient-wise comparison with absolute tolerance (0 = exact).
  bool approx_equal(const Grassmann& other, double tol = 0.0) const;
  friend bool operator==(const Grassmann& a, const Grassmann& b) { return a.approx_equal(b, 0.0); }

  // "a0 + a1*t1 + a12*t1^t2" style rendering.
  std::string to_string(int precision = 12) const;

 private:
  void check_same_algebra(const Grassmann& other) const;

  int generators_;
  std::vector<double> dense_;
  std::map<Mask, double> sparse_;
};

// Sign (+1/-1) of the product of basis monomials a*b, zero if they overlap.
int basis_product_sign(Grassmann::Mask a, Grassmann::Mask b) noexcept;

// Parity of a basis monomial (popcount mod 2).
inline bool mask_is_odd(Grassmann::Mask m) noexcept { return (__builtin_popcount(m) & 1U) != 0; }

std::pair<double, Grassmann> body_soul(const Grassmann& a);

// Largest absolute coefficient of a - b.
double max_abs_diff(const Grassmann& a, const Grassmann& b);

// f(b + s) = sum_k f^(k)(b) s^k / k!, for an even argument b + s. `derivatives`
// holds f(b), f'(b), f''(b), ...; entries past floor(L/2) are not needed
// because s^(floor(L/2)+1) = 0.
Grassmann apply_taylor(const Grassmann& arg, std::span<const double> derivatives);

// JSON: array of [mask, coefficient] pairs, nonzero terms only.
nlohmann::json to_json(const Grassmann& a);
// Reading also accepts a plain number (the body) and bit-string masks "0110".
Grassmann grassmann_from_json(const nlohmann::json& j, int generators);

}  // namespace sgeo
