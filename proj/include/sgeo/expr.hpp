#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgeo/grassmann.hpp"

namespace sgeo {

// Ordered coordinate names of an m|n chart. Indices 0..m-1 are the even
// coordinates, m..m+n-1 the odd ones.
class ChartSignature {
 public:
  ChartSignature() = default;
  ChartSignature(std::vector<std::string> even_names, std::vector<std::string> odd_names);

  int even_count() const noexcept { return static_cast<int>(even_.size()); }
  int odd_count() const noexcept { return static_cast<int>(odd_.size()); }
  int size() const noexcept { return even_count() + odd_count(); }

  bool is_odd(int index) const noexcept { return index >= even_count(); }
  int parity_bit(int index) const noexcept { return is_odd(index) ? 1 : 0; }
  const std::string& name(int index) const;

  std::optional<int> find(std::string_view name) const;
  // Throws UnknownCoordinate.
  int index_of(std::string_view name) const;

  const std::vector<std::string>& even_names() const noexcept { return even_; }
  const std::vector<std::string>& odd_names() const noexcept { return odd_; }

  friend bool operator==(const ChartSignature&, const ChartSignature&) = default;

 private:
  std::vector<std::string> even_;
  std::vector<std::string> odd_;
};

// Grassmann-valued coordinate assignment, i.e. the pullbacks of the chart
// coordinates under a morphism R^{0|L} -> chart.
struct SuperPoint {
  int L = 0;
  std::vector<Grassmann> values;

  static SuperPoint body_point(std::span<const double> even_values, int odd_count, int L);
  std::vector<double> body() const;
  int size() const noexcept { return static_cast<int>(values.size()); }
};

// Throws InvalidPoint on size/L mismatch, ParityViolation on wrong-parity values.
void validate_point(const ChartSignature& sig, const SuperPoint& p);

// Immutable symbolic superfunction on a chart. Cheap to copy (shared tree).
//
// Nodes: real constant, coordinate variable, sum, ordered product, integer
// power of an even base (negative exponents are reciprocals), and the
// elementary functions exp/sin/cos/log of an even argument. The builders
// normalize as they go: nested sums and products are flattened, constants
// folded, even factors moved ahead of odd ones, odd variable factors sorted
// with the sign of the permutation, and repeated odd variables killed.
class Expr {
 public:
  enum class Kind { constant, variable, sum, product, power, function };
  enum class Func { exp, sin, cos, log };

  Expr();  // zero
  static Expr constant(double value);
  static Expr variable(int index, bool odd);

  Kind kind() const noexcept;
  double value() const noexcept;        // constant
  int index() const noexcept;           // variable
  bool is_odd_variable() const noexcept;
  int exponent() const noexcept;        // power
  Func func() const noexcept;           // function
  const std::vector<Expr>& children() const noexcept;
  Parity parity() const noexcept;

  bool is_constant() const noexcept { return kind() == Kind::constant; }
  bool is_zero() const noexcept { return is_constant() && value() == 0.0; }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  static Expr sum(std::vector<Expr> terms);
  static Expr product(std::vector<Expr> factors);
  // Throws ParityViolation for negative powers of non-even bases.
  static Expr power(const Expr& base, int exponent);
  // Throws ParityViolation for a non-even argument.
  static Expr apply(Func f, const Expr& arg);
  static Expr reciprocal(const Expr& e) { return power(e, -1); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

const char* to_string(Expr::Func f) noexcept;

// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' integer | '^' '(' ['-'] integer ')' | '^' '-' integer)?
//   primary := number | coordinate | func '(' expr ')' | '(' expr ')'
//   func    := exp | sin | cos | log
// Throws SyntaxError, UnknownIdentifier, ParityViolation.
Expr parse_expr(std::string_view text, const ChartSignature& sig);

std::string to_string(const Expr& e, const ChartSignature& sig);

// Partial derivative by a coordinate. Odd coordinates use the LEFT derivative:
// d_th(th*f) = f, and d_th(a*b) = d_th(a)*b + (-1)^|a| a*d_th(b).
// Throws NonHomogeneousOperand when that sign is needed for a mixed-parity a.
Expr partial(const Expr& e, int index, bool odd);
Expr partial(const Expr& e, const ChartSignature& sig, std::string_view coord);

// Replaces variable i by replacements[i], renormalizing.
Expr substitute(const Expr& e, std::span<const Expr> replacements);

// Evaluation at Grassmann-valued coordinates; no parity validation. Throws
// DomainError for reciprocals of zero-body values and logs of non-positive bodies.
Grassmann evaluate(const Expr& e, std::span<const Grassmann> values, int L);

// Validating entry point.
Grassmann expr_eval(const Expr& e, const ChartSignature& sig, const SuperPoint& p);

// Plain real evaluation; odd variables are not allowed.
double evaluate_real(const Expr& e, std::span<const double> values);

// Morphism between charts, given by the pullbacks of the target coordinates.
struct SuperMorphism {
  ChartSignature source;
  ChartSignature target;
  std::vector<Expr> pullbacks;
};

// Checks pullback count and parities; throws SignatureMismatch/ParityViolation.
SuperMorphism make_morphism(ChartSignature source, ChartSignature target, std::vector<Expr> pullbacks);
SuperMorphism identity_morphism(const ChartSignature& sig);

// f o g: apply g first. Throws SignatureMismatch unless g.target == f.source.
SuperMorphism compose(const SuperMorphism& f, const SuperMorphism& g);

// Image of a source point.
SuperPoint apply(const SuperMorphism& phi, const SuperPoint& p);

}  // namespace sgeo
