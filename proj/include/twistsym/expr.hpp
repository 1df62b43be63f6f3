#pragma once

// Canonical symbolic expressions over jet coordinates.
//
// Every Expr is an immutable, shareable DAG node held by shared_ptr. All
// constructors below return canonical forms:
//   * sums and products are flattened and sorted by the total order `compare`;
//   * numeric constants are folded, rationals are in lowest terms;
//   * x+0 -> x, x*1 -> x, x*0 -> 0, x^0 -> 1, x^1 -> x;
//   * products of sums and positive integer powers of sums are expanded, so
//     polynomial (and Laurent polynomial) expressions have a unique form;
//   * exp factors of one product merge: exp(a)*exp(b) -> exp(a+b).
//
// Node order: numbers < symbols < functions < powers < products < sums.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "twistsym/multi_index.hpp"
#include "twistsym/rational.hpp"

namespace twistsym {

enum class SymbolRole : std::uint8_t { Independent = 0, Jet = 1, Parameter = 2 };

/// A named coordinate. Jet coordinates carry the dependent-variable index
/// and the multi-index of differentiation; order-0 jets are the dependent
/// variables themselves.
struct Symbol {
  SymbolRole role = SymbolRole::Parameter;
  std::string base;     // "x", "u", "c"
  int index = -1;       // independent or dependent variable index
  MultiIndex multi;     // jets only
  std::string display;  // printed name, e.g. "u_xy"

  bool same(const Symbol& o) const { return role == o.role && base == o.base && multi == o.multi; }
};

enum class NodeKind : std::uint8_t { Number = 0, Sym = 1, Function = 2, Power = 3, Product = 4, Sum = 5 };
enum class FuncKind : std::uint8_t { Exp, Log, Sin, Cos, Tan, Opaque };

struct Node;

class Expr {
 public:
  Expr();  // the constant 0
  Expr(Rational r);  // NOLINT(implicit)
  Expr(std::int64_t n) : Expr(Rational(n)) {}  // NOLINT(implicit)
  Expr(int n) : Expr(Rational(n)) {}           // NOLINT(implicit)

  NodeKind kind() const;
  bool is_number() const { return kind() == NodeKind::Number; }
  bool is_symbol() const { return kind() == NodeKind::Sym; }
  bool is_zero() const;  // structural: canonical constant 0
  bool is_one() const;

  /// Number value; only valid for numbers.
  const Rational& value() const;
  const Symbol& symbol() const;
  FuncKind func_kind() const;
  const std::string& func_name() const;
  /// Formal partial-derivative tags of an opaque kernel (sorted argument positions).
  const std::vector<int>& func_tags() const;
  /// Function arguments, the power base (single element), product bases or sum terms.
  const std::vector<Expr>& children() const;
  /// Power exponent, product exponents (per child) or sum coefficients (per child).
  const std::vector<Rational>& weights() const;
  /// Product coefficient or sum constant.
  const Rational& scalar() const;
  const Expr& base() const { return children()[0]; }
  const Rational& exponent() const { return weights()[0]; }

  std::size_t hash() const;
  const Node* id() const { return node_.get(); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  std::string str() const;

 private:
  friend struct ExprBuilder;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Total order on canonical expressions; returns <0, 0, >0.
int compare(const Expr& a, const Expr& b);

struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};
struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e.hash(); }
};

template <typename V>
using ExprMap = std::unordered_map<Expr, V, ExprHash>;

// ---- canonical constructors ----------------------------------------------

Expr make_symbol(Symbol s);
Expr add(std::span<const Expr> terms);
Expr mul(std::span<const Expr> factors);
Expr pow(const Expr& base, const Rational& exponent);
/// Power with an expression exponent; the exponent must be a rational number.
Expr pow(const Expr& base, const Expr& exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr sqrt(const Expr& a);
Expr opaque(const std::string& name, std::vector<int> tags, std::vector<Expr> args);
Expr apply_function(FuncKind kind, const Expr& arg);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);

/// Splits a canonical expression into rational coefficient and coefficient-free part.
std::pair<Rational, Expr> split_coefficient(const Expr& e);

// ---- structural queries ----------------------------------------------------

/// Distinct symbols appearing in e, sorted by `compare`.
std::vector<Expr> free_symbols(const Expr& e);
bool depends_on(const Expr& e, const Symbol& s);
/// Highest jet order appearing in e; -1 if e contains no jet coordinate.
int jet_order(const Expr& e);
/// Canonical-form size (node count, shared nodes counted each time).
std::size_t tree_size(const Expr& e);

// ---- calculus ----------------------------------------------------------------

/// Derivation rule: value of the derivation on a symbol.
using SymbolRule = std::function<Expr(const Symbol&)>;

/// Applies the unique derivation extending `rule` through the chain rule.
/// Opaque kernels produce formal partial tags f_{,k}.
Expr derive(const Expr& e, const SymbolRule& rule);

/// Partial derivative treating every coordinate (including jets) as independent.
Expr diff(const Expr& e, const Symbol& s);
Expr diff(const Expr& e, const Expr& symbol);

/// Simultaneous substitution of symbols, followed by canonicalization.
Expr substitute(const Expr& e, const ExprMap<Expr>& map);
Expr substitute(const Expr& e, const Expr& symbol, const Expr& value);

// ---- evaluation --------------------------------------------------------------

struct Valuation {
  std::function<double(const Symbol&)> symbol;
  /// Optional handler for opaque kernels; absent means "not evaluable".
  std::function<double(const Expr& application)> opaque;
};

/// Double-precision evaluation. Throws std::domain_error for opaque kernels
/// without a handler; non-finite intermediate results propagate as NaN/inf.
double evaluate(const Expr& e, const Valuation& v);

// ---- zero testing ------------------------------------------------------------

enum class ZeroTest { Yes, No, Unknown };
const char* to_string(ZeroTest z);

/// Numerator/denominator pair with polynomial (Laurent) numerator and denominator.
struct Fraction {
  Expr num;
  Expr den;
};
Fraction to_fraction(const Expr& e);
/// num/den from to_fraction with negative symbol powers cleared from both.
Expr normal_form(const Expr& e);

/// Sound but incomplete zero test: Yes iff the rational normal form has zero
/// numerator; No if that numerator is a nonzero polynomial in algebraically
/// independent atoms or a sample point evaluates clearly nonzero; Unknown
/// otherwise.
ZeroTest is_zero(const Expr& e);

}  // namespace twistsym

template <>
struct std::hash<twistsym::Expr> {
  std::size_t operator()(const twistsym::Expr& e) const { return e.hash(); }
};
