#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "twistsym/expr.hpp"

namespace twistsym {

struct Node {
  NodeKind kind = NodeKind::Number;
  std::size_t hash = 0;
  std::uint64_t symmask = 0;  // union of symbol_bit over contained symbols
  int jorder = -1;            // highest jet order contained
  Rational scalar;            // number value, product coefficient, sum constant
  std::shared_ptr<const Symbol> sym;
  FuncKind fkind = FuncKind::Exp;
  std::string fname;
  std::vector<int> tags;
  std::vector<Expr> kids;
  std::vector<Rational> weights;
};

std::uint64_t symbol_bit(const Symbol& s);

/// derive() restricted to expressions whose symbol mask meets `support`; the
/// rule must vanish on symbols outside it.
Expr derive(const Expr& e, const SymbolRule& rule, std::uint64_t support);
inline std::uint64_t symbol_mask(const Expr& e);

struct ExprBuilder {
  static Expr finish(Node n);
  static const Node& node(const Expr& e) { return *e.node_; }
};

inline std::uint64_t symbol_mask(const Expr& e) { return ExprBuilder::node(e).symmask; }

using Factor = std::pair<Expr, Rational>;

/// Builds a product node from already merged, sorted factors (no canonical checks
/// beyond collapsing trivial cases).
Expr make_monomial(const Rational& coef, std::vector<Factor> factors);
/// Monomial view of a non-sum expression.
void monomial_of(const Expr& e, Rational& coef, std::vector<Factor>& factors);

}  // namespace twistsym
