#pragma once

#include <memory>
#include <mutex>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "twistsym/expr.hpp"
#include "twistsym/symbols.hpp"

namespace twistsym {

/// Jet space J^k of maps R^p -> R^q with declared parameters and kernels.
/// Immutable; copies share the symbol table.
class JetContext {
 public:
  JetContext() = default;
  JetContext(Declarations d, int order);

  const SymbolTable& symbols() const { return *table_; }
  int order() const { return order_; }
  int p() const { return table_->n_independent(); }
  int q() const { return table_->n_dependent(); }

  Expr x(int i) const { return table_->independent(i); }
  Expr u(int a) const { return table_->dependent(a); }
  Expr jet(int a, const MultiIndex& J) const { return table_->jet(a, J); }
  Expr parse(std::string_view text) const { return twistsym::parse(text, *table_); }

  JetContext with_order(int k) const;

  /// Jet coordinates u^a_J with |J| <= k, ordered by order, then a, then J.
  std::vector<Expr> jets_up_to(int k) const;
  /// Base coordinates x^i followed by jets_up_to(k).
  std::vector<Expr> coordinates(int k) const;

 private:
  std::shared_ptr<const SymbolTable> table_ = std::make_shared<const SymbolTable>();
  int order_ = 0;
};

/// Total derivative D_i.
Expr total_derivative(const Expr& f, int i, const JetContext& ctx);
/// Iterated total derivative D_J.
Expr total_derivative(const Expr& f, const MultiIndex& J, const JetContext& ctx);

/// u^dep_lead = rhs.
struct SolvedEquation {
  int dep = 0;
  MultiIndex lead;
  Expr rhs;
};

/// A system in solved form together with its differential consequences.
/// Restriction replaces every jet u^a_L with L containing a lead K by the
/// restricted D_{L-K} rhs.
class SolvedSystem {
 public:
  SolvedSystem() = default;
  SolvedSystem(JetContext ctx, std::vector<SolvedEquation> eqs);

  const JetContext& context() const { return ctx_; }
  const std::vector<SolvedEquation>& equations() const { return eqs_; }
  bool empty() const { return eqs_.empty(); }
  /// Highest lead order.
  int order() const;

  /// Restriction to the solution manifold S_Δ and its prolongations.
  /// Throws std::invalid_argument when two leads apply to one jet and
  /// std::runtime_error when substitution does not terminate.
  Expr restrict(const Expr& e) const;
  /// Whether u^a_L is a lead or a derivative of one.
  bool is_principal(int a, const MultiIndex& L) const;
  /// Equation residual u^dep_lead - rhs.
  Expr residual(std::size_t k) const;

 private:
  Expr replacement(int a, const MultiIndex& L, int depth) const;
  Expr restrict_impl(const Expr& e, int depth) const;

  JetContext ctx_;
  std::vector<SolvedEquation> eqs_;
  struct Cache {
    std::recursive_mutex mu;
    std::unordered_map<std::size_t, std::vector<std::pair<Expr, Expr>>> memo;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

ZeroTest is_zero_on(const Expr& e, const SolvedSystem& sys);

}  // namespace twistsym
