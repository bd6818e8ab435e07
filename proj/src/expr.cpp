#include "sgeo/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_set>

#include "sgeo/error.hpp"

namespace sgeo {

// ---------------------------------------------------------------------------
// ChartSignature / SuperPoint

namespace {

bool is_reserved_name(std::string_view n) {
  return n == "exp" || n == "sin" || n == "cos" || n == "log";
}

bool is_identifier(std::string_view n) {
  if (n.empty() || !(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_')) return false;
  return std::all_of(n.begin(), n.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace

ChartSignature::ChartSignature(std::vector<std::string> even_names, std::vector<std::string> odd_names)
    : even_(std::move(even_names)), odd_(std::move(odd_names)) {
  std::unordered_set<std::string> seen;
  for (int i = 0; i < size(); ++i) {
    const std::string& n = name(i);
    if (!is_identifier(n) || is_reserved_name(n))
      throw Error(ErrorCode::ModelError, "invalid coordinate name '" + n + "'");
    if (!seen.insert(n).second) throw Error(ErrorCode::ModelError, "duplicate coordinate name '" + n + "'");
  }
}

const std::string& ChartSignature::name(int index) const {
  if (index < 0 || index >= size()) throw Error(ErrorCode::UnknownCoordinate, "coordinate index out of range");
  return index < even_count() ? even_[index] : odd_[index - even_count()];
}

std::optional<int> ChartSignature::find(std::string_view n) const {
  for (int i = 0; i < size(); ++i)
    if (name(i) == n) return i;
  return std::nullopt;
}

int ChartSignature::index_of(std::string_view n) const {
  if (auto i = find(n)) return *i;
  throw Error(ErrorCode::UnknownCoordinate, "no coordinate named '" + std::string(n) + "'");
}

SuperPoint SuperPoint::body_point(std::span<const double> even_values, int odd_count, int L) {
  SuperPoint p;
  p.L = L;
  for (double v : even_values) p.values.emplace_back(L, v);
  for (int i = 0; i < odd_count; ++i) p.values.emplace_back(L);
  return p;
}

std::vector<double> SuperPoint::body() const {
  std::vector<double> b;
  b.reserve(values.size());
  for (const auto& v : values) b.push_back(v.body());
  return b;
}

void validate_point(const ChartSignature& sig, const SuperPoint& p) {
  if (p.size() != sig.size())
    throw Error(ErrorCode::InvalidPoint, "point has " + std::to_string(p.size()) + " coordinates, chart has " +
                                             std::to_string(sig.size()));
  for (int i = 0; i < sig.size(); ++i) {
    const Grassmann& v = p.values[i];
    if (v.generators() != p.L)
      throw Error(ErrorCode::InvalidPoint, "coordinate '" + sig.name(i) + "' is not over L=" + std::to_string(p.L));
    const bool ok = sig.is_odd(i) ? v.is_odd() : v.is_even();
    if (!ok)
      throw Error(ErrorCode::ParityViolation, "coordinate '" + sig.name(i) + "' expects an " +
                                                  (sig.is_odd(i) ? "odd" : "even") + " value, got " +
                                                  to_string(v.parity()));
  }
}

// ---------------------------------------------------------------------------
// Expr nodes and normalizing builders

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  int index = -1;
  bool odd = false;
  int exponent = 0;
  Func func = Func::exp;
  std::vector<Expr> children;
  Parity parity = Parity::even;
};

namespace {

Parity combine_sum_parity(Parity a, Parity b) { return a == b ? a : Parity::nonhomogeneous; }

Parity combine_product_parity(Parity a, Parity b) {
  if (a == Parity::nonhomogeneous || b == Parity::nonhomogeneous) return Parity::nonhomogeneous;
  return a == b ? Parity::even : Parity::odd;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(int index, bool odd) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  n->index = index;
  n->odd = odd;
  n->parity = odd ? Parity::odd : Parity::even;
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }
double Expr::value() const noexcept { return node_->value; }
int Expr::index() const noexcept { return node_->index; }
bool Expr::is_odd_variable() const noexcept { return node_->kind == Kind::variable && node_->odd; }
int Expr::exponent() const noexcept { return node_->exponent; }
Expr::Func Expr::func() const noexcept { return node_->func; }
const std::vector<Expr>& Expr::children() const noexcept { return node_->children; }
Parity Expr::parity() const noexcept { return node_->parity; }

Expr Expr::sum(std::vector<Expr> terms) {
  double c = 0.0;
  std::vector<Expr> rest;
  for (auto& t : terms) {
    if (t.kind() == Kind::sum) {
      for (const auto& s : t.children()) {
        if (s.is_constant()) c += s.value();
        else rest.push_back(s);
      }
    } else if (t.is_constant()) {
      c += t.value();
    } else {
      rest.push_back(std::move(t));
    }
  }
  if (rest.empty()) return constant(c);
  if (c != 0.0) rest.push_back(constant(c));
  if (rest.size() == 1) return rest.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::sum;
  n->parity = rest.front().parity();
  for (const auto& t : rest) n->parity = combine_sum_parity(n->parity, t.parity());
  n->children = std::move(rest);
  return Expr(std::move(n));
}

Expr Expr::product(std::vector<Expr> factors) {
  double c = 1.0;
  std::vector<Expr> rest;
  for (auto& f : factors) {
    if (f.kind() == Kind::product) {
      for (const auto& s : f.children()) {
        if (s.is_constant()) c *= s.value();
        else rest.push_back(s);
      }
    } else if (f.is_constant()) {
      c *= f.value();
    } else {
      rest.push_back(std::move(f));
    }
  }
  if (c == 0.0) return constant(0.0);
  if (rest.empty()) return constant(c);

  const bool any_mixed = std::any_of(rest.begin(), rest.end(),
                                     [](const Expr& e) { return e.parity() == Parity::nonhomogeneous; });
  if (!any_mixed) {
    std::vector<Expr> evens, odds;
    for (auto& f : rest) (f.parity() == Parity::odd ? odds : evens).push_back(std::move(f));
    if (std::all_of(odds.begin(), odds.end(), [](const Expr& e) { return e.is_odd_variable(); })) {
      // Insertion sort by coordinate index; each transposition of two odd
      // factors flips the sign.
      for (std::size_t i = 1; i < odds.size(); ++i)
        for (std::size_t j = i; j > 0 && odds[j - 1].index() > odds[j].index(); --j) {
          std::swap(odds[j - 1], odds[j]);
          c = -c;
        }
      for (std::size_t i = 1; i < odds.size(); ++i)
        if (odds[i - 1].index() == odds[i].index()) return constant(0.0);
    }
    rest = std::move(evens);
    rest.insert(rest.end(), std::make_move_iterator(odds.begin()), std::make_move_iterator(odds.end()));
  }
  if (c != 1.0) rest.insert(rest.begin(), constant(c));
  if (rest.size() == 1) return rest.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::product;
  n->parity = Parity::even;
  for (const auto& f : rest) n->parity = combine_product_parity(n->parity, f.parity());
  n->children = std::move(rest);
  return Expr(std::move(n));
}

Expr Expr::power(const Expr& base, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    if (base.value() == 0.0 && exponent < 0) throw Error(ErrorCode::DomainError, "reciprocal of zero");
    return constant(std::pow(base.value(), exponent));
  }
  switch (base.parity()) {
    case Parity::odd:
      if (exponent < 0) throw Error(ErrorCode::ParityViolation, "negative power of an odd expression");
      return constant(0.0);  // a^2 = 0 for odd a
    case Parity::nonhomogeneous: {
      if (exponent < 0) throw Error(ErrorCode::ParityViolation, "negative power of a mixed-parity expression");
      return product(std::vector<Expr>(static_cast<std::size_t>(exponent), base));
    }
    case Parity::even: break;
  }
  if (base.kind() == Kind::power) return power(base.children().front(), base.exponent() * exponent);
  auto n = std::make_shared<Node>();
  n->kind = Kind::power;
  n->exponent = exponent;
  n->children = {base};
  return Expr(std::move(n));
}

namespace {

// f^(k)(x) for k = 0..order.
std::vector<double> function_derivatives(Expr::Func f, double x, int order) {
  std::vector<double> d(static_cast<std::size_t>(order) + 1);
  switch (f) {
    case Expr::Func::exp:
      std::fill(d.begin(), d.end(), std::exp(x));
      break;
    case Expr::Func::sin:
    case Expr::Func::cos: {
      const double s = std::sin(x), c = std::cos(x);
      const double cycle[4] = {s, c, -s, -c};
      const int shift = f == Expr::Func::sin ? 0 : 1;
      for (int k = 0; k <= order; ++k) d[k] = cycle[(k + shift) % 4];
      break;
    }
    case Expr::Func::log: {
      if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "log of non-positive body " + std::to_string(x));
      d[0] = std::log(x);
      double fact = 1.0;  // (k-1)!
      for (int k = 1; k <= order; ++k) {
        if (k > 1) fact *= static_cast<double>(k - 1);
        d[k] = ((k % 2) ? 1.0 : -1.0) * fact / std::pow(x, k);
      }
      break;
    }
  }
  return d;
}

}  // namespace

Expr Expr::apply(Func f, const Expr& arg) {
  if (arg.parity() != Parity::even)
    throw Error(ErrorCode::ParityViolation, std::string(to_string(f)) + " of a non-even expression");
  if (arg.is_constant()) return constant(function_derivatives(f, arg.value(), 0)[0]);
  auto n = std::make_shared<Node>();
  n->kind = Kind::function;
  n->func = f;
  n->children = {arg};
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, -b}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator-(const Expr& a) { return Expr::product({Expr::constant(-1.0), a}); }

const char* to_string(Expr::Func f) noexcept {
  switch (f) {
    case Expr::Func::exp: return "exp";
    case Expr::Func::sin: return "sin";
    case Expr::Func::cos: return "cos";
    case Expr::Func::log: return "log";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ChartSignature& sig) : text_(text), sig_(sig) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::SyntaxError, msg + " at offset " + std::to_string(pos_) + " in \"" +
                                            std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+')) terms.push_back(term());
      else if (accept('-')) terms.push_back(-term());
      else break;
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    std::vector<Expr> factors{unary()};
    for (;;) {
      if (accept('*')) factors.push_back(unary());
      else if (accept('/')) factors.push_back(Expr::reciprocal(unary()));
      else break;
    }
    return Expr::product(std::move(factors));
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    int sign = 1;
    bool paren = accept('(');
    if (accept('-')) sign = -1;
    else accept('+');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer literal");
    int n = 0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
    if (ec != std::errc()) fail("exponent out of range");
    if (paren) expect(')');
    return Expr::power(base, sign * n);
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view id = text_.substr(start, pos_ - start);
      if (is_reserved_name(id)) {
        const Expr::Func f = id == "exp" ? Expr::Func::exp
                             : id == "sin" ? Expr::Func::sin
                             : id == "cos" ? Expr::Func::cos
                                           : Expr::Func::log;
        expect('(');
        Expr arg = expr();
        expect(')');
        return Expr::apply(f, arg);
      }
      if (auto idx = sig_.find(id)) return Expr::variable(*idx, sig_.is_odd(*idx));
      throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + std::string(id) + "'");
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || p != text_.data() + pos_) fail("malformed number");
    return Expr::constant(v);
  }

  std::string_view text_;
  const ChartSignature& sig_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace

Expr parse_expr(std::string_view text, const ChartSignature& sig) { return Parser(text, sig).parse(); }

std::string to_string(const Expr& e, const ChartSignature& sig) {
  switch (e.kind()) {
    case Expr::Kind::constant: {
      const std::string s = format_number(e.value());
      return e.value() < 0 ? "(" + s + ")" : s;
    }
    case Expr::Kind::variable: return sig.name(e.index());
    case Expr::Kind::sum: {
      std::string out;
      for (const auto& t : e.children()) {
        if (!out.empty()) out += " + ";
        out += to_string(t, sig);
      }
      return out;
    }
    case Expr::Kind::product: {
      std::string out;
      for (const auto& f : e.children()) {
        if (!out.empty()) out += "*";
        const std::string s = to_string(f, sig);
        out += f.kind() == Expr::Kind::sum ? "(" + s + ")" : s;
      }
      return out;
    }
    case Expr::Kind::power: {
      const Expr& b = e.children().front();
      std::string s = to_string(b, sig);
      if (b.kind() != Expr::Kind::variable && b.kind() != Expr::Kind::function) s = "(" + s + ")";
      return s + "^" + (e.exponent() < 0 ? "(" + std::to_string(e.exponent()) + ")" : std::to_string(e.exponent()));
    }
    case Expr::Kind::function:
      return std::string(to_string(e.func())) + "(" + to_string(e.children().front(), sig) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Calculus

Expr partial(const Expr& e, int index, bool odd) {
  switch (e.kind()) {
    case Expr::Kind::constant: return Expr::constant(0.0);
    case Expr::Kind::variable: return Expr::constant(e.index() == index ? 1.0 : 0.0);
    case Expr::Kind::sum: {
      std::vector<Expr> terms;
      for (const auto& t : e.children()) terms.push_back(partial(t, index, odd));
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::product: {
      const auto& f = e.children();
      std::vector<Expr> terms;
      bool prefix_odd = false;
      bool prefix_mixed = false;
      for (std::size_t k = 0; k < f.size(); ++k) {
        Expr dk = partial(f[k], index, odd);
        if (!dk.is_zero()) {
          if (odd && prefix_mixed)
            throw Error(ErrorCode::NonHomogeneousOperand,
                        "odd derivative passes a mixed-parity factor");
          std::vector<Expr> factors(f.begin(), f.end());
          factors[k] = dk;
          Expr term = Expr::product(std::move(factors));
          terms.push_back(odd && prefix_odd ? -term : term);
        }
        if (f[k].parity() == Parity::nonhomogeneous) prefix_mixed = true;
        else if (f[k].parity() == Parity::odd) prefix_odd = !prefix_odd;
      }
      return Expr::sum(std::move(terms));
    }
    case Expr::Kind::power: {
      const Expr& b = e.children().front();
      Expr db = partial(b, index, odd);
      if (db.is_zero()) return db;
      const int n = e.exponent();
      return Expr::product({Expr::constant(n), Expr::power(b, n - 1), db});
    }
    case Expr::Kind::function: {
      const Expr& u = e.children().front();
      Expr du = partial(u, index, odd);
      if (du.is_zero()) return du;
      Expr outer;
      switch (e.func()) {
        case Expr::Func::exp: outer = e; break;
        case Expr::Func::sin: outer = Expr::apply(Expr::Func::cos, u); break;
        case Expr::Func::cos: outer = -Expr::apply(Expr::Func::sin, u); break;
        case Expr::Func::log: outer = Expr::reciprocal(u); break;
      }
      return outer * du;
    }
  }
  return Expr::constant(0.0);
}

Expr partial(const Expr& e, const ChartSignature& sig, std::string_view coord) {
  const int idx = sig.index_of(coord);
  return partial(e, idx, sig.is_odd(idx));
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  switch (e.kind()) {
    case Expr::Kind::constant: return e;
    case Expr::Kind::variable:
      if (e.index() < 0 || static_cast<std::size_t>(e.index()) >= replacements.size())
        throw Error(ErrorCode::SignatureMismatch, "substitution is missing a coordinate");
      return replacements[static_cast<std::size_t>(e.index())];
    case Expr::Kind::sum:
    case Expr::Kind::product: {
      std::vector<Expr> parts;
      for (const auto& c : e.children()) parts.push_back(substitute(c, replacements));
      return e.kind() == Expr::Kind::sum ? Expr::sum(std::move(parts)) : Expr::product(std::move(parts));
    }
    case Expr::Kind::power: return Expr::power(substitute(e.children().front(), replacements), e.exponent());
    case Expr::Kind::function: return Expr::apply(e.func(), substitute(e.children().front(), replacements));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

Grassmann int_power(Grassmann base, unsigned n, int L) {
  Grassmann r(L, 1.0);
  while (n > 0) {
    if (n & 1U) r = r * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return r;
}

}  // namespace

Grassmann evaluate(const Expr& e, std::span<const Grassmann> values, int L) {
  switch (e.kind()) {
    case Expr::Kind::constant: return Grassmann(L, e.value());
    case Expr::Kind::variable: return values[static_cast<std::size_t>(e.index())];
    case Expr::Kind::sum: {
      Grassmann r(L);
      for (const auto& t : e.children()) r += evaluate(t, values, L);
      return r;
    }
    case Expr::Kind::product: {
      const auto& f = e.children();
      Grassmann r = evaluate(f.front(), values, L);
      for (std::size_t k = 1; k < f.size(); ++k) r = r * evaluate(f[k], values, L);
      return r;
    }
    case Expr::Kind::power: {
      Grassmann b = evaluate(e.children().front(), values, L);
      const int n = e.exponent();
      if (n < 0) {
        if (b.body() == 0.0) throw Error(ErrorCode::DomainError, "reciprocal of a value with zero body");
        if (b.parity() != Parity::even) throw Error(ErrorCode::ParityViolation, "reciprocal of a non-even value");
        b = b.inverse();
      }
      return int_power(std::move(b), static_cast<unsigned>(n < 0 ? -n : n), L);
    }
    case Expr::Kind::function: {
      const Grassmann a = evaluate(e.children().front(), values, L);
      const auto d = function_derivatives(e.func(), a.body(), L / 2);
      return apply_taylor(a, d);
    }
  }
  return Grassmann(L);
}

Grassmann expr_eval(const Expr& e, const ChartSignature& sig, const SuperPoint& p) {
  validate_point(sig, p);
  return evaluate(e, p.values, p.L);
}

double evaluate_real(const Expr& e, std::span<const double> values) {
  switch (e.kind()) {
    case Expr::Kind::constant: return e.value();
    case Expr::Kind::variable:
      if (e.is_odd_variable()) throw Error(ErrorCode::ParityViolation, "odd variable in a real evaluation");
      return values[static_cast<std::size_t>(e.index())];
    case Expr::Kind::sum: {
      double r = 0.0;
      for (const auto& t : e.children()) r += evaluate_real(t, values);
      return r;
    }
    case Expr::Kind::product: {
      double r = 1.0;
      for (const auto& f : e.children()) r *= evaluate_real(f, values);
      return r;
    }
    case Expr::Kind::power: {
      const double b = evaluate_real(e.children().front(), values);
      if (b == 0.0 && e.exponent() < 0) throw Error(ErrorCode::DomainError, "reciprocal of zero");
      return std::pow(b, e.exponent());
    }
    case Expr::Kind::function: {
      const double a = evaluate_real(e.children().front(), values);
      switch (e.func()) {
        case Expr::Func::exp: return std::exp(a);
        case Expr::Func::sin: return std::sin(a);
        case Expr::Func::cos: return std::cos(a);
        case Expr::Func::log:
          if (!(a > 0.0)) throw Error(ErrorCode::DomainError, "log of non-positive value");
          return std::log(a);
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Morphisms

SuperMorphism make_morphism(ChartSignature source, ChartSignature target, std::vector<Expr> pullbacks) {
  if (static_cast<int>(pullbacks.size()) != target.size())
    throw Error(ErrorCode::SignatureMismatch, "need one pullback per target coordinate");
  for (int k = 0; k < target.size(); ++k) {
    const Expr& e = pullbacks[static_cast<std::size_t>(k)];
    const Parity want = target.is_odd(k) ? Parity::odd : Parity::even;
    if (!e.is_zero() && e.parity() != want)
      throw Error(ErrorCode::ParityViolation, "pullback of '" + target.name(k) + "' must be " + to_string(want));
  }
  return SuperMorphism{std::move(source), std::move(target), std::move(pullbacks)};
}

SuperMorphism identity_morphism(const ChartSignature& sig) {
  std::vector<Expr> pb;
  for (int i = 0; i < sig.size(); ++i) pb.push_back(Expr::variable(i, sig.is_odd(i)));
  return SuperMorphism{sig, sig, std::move(pb)};
}

SuperMorphism compose(const SuperMorphism& f, const SuperMorphism& g) {
  if (!(g.target == f.source)) throw Error(ErrorCode::SignatureMismatch, "g's target is not f's source");
  std::vector<Expr> pb;
  pb.reserve(f.pullbacks.size());
  for (const auto& e : f.pullbacks) pb.push_back(substitute(e, g.pullbacks));
  return make_morphism(g.source, f.target, std::move(pb));
}

SuperPoint apply(const SuperMorphism& phi, const SuperPoint& p) {
  validate_point(phi.source, p);
  SuperPoint out;
  out.L = p.L;
  for (const auto& e : phi.pullbacks) out.values.push_back(evaluate(e, p.values, p.L));
  return out;
}

}  // namespace sgeo
