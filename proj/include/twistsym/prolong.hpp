#pragma once

#include <map>
#include <utility>
#include <vector>

#include "twistsym/forms.hpp"
#include "twistsym/jet.hpp"
#include "twistsym/matrix.hpp"

namespace twistsym {

/// X = ξ^i ∂/∂x^i + φ^a ∂/∂u^a. Point fields depend on (x, u) only;
/// generalized fields (evolutionary representatives) may depend on jets.
struct PointVectorField {
  std::vector<Expr> xi;
  std::vector<Expr> phi;
  bool generalized = false;

  bool vertical() const;
};

/// Validates dimensions and, unless `generalized`, that coefficients do not
/// involve derivative jets.
PointVectorField make_field(const JetContext& ctx, std::vector<Expr> xi, std::vector<Expr> phi,
                            bool generalized = false);

/// Q^a = φ^a − u^a_i ξ^i as a vertical (generalized) field.
PointVectorField evolutionary_rep(const PointVectorField& X, const JetContext& ctx);

/// μ = Λ_i dx^i, one q×q matrix per independent variable.
struct MuForm {
  std::vector<ExprMatrix> Lambda;

  static MuForm zero(const JetContext& ctx);
  /// Scalar μ = λ_i dx^i (q = 1).
  static MuForm scalar(const std::vector<Expr>& lambdas);
  /// Λ_i = λ_i I for a q-component system.
  static MuForm diagonal(const std::vector<Expr>& lambdas, int q);

  bool is_zero() const;
  bool is_scalar() const { return !Lambda.empty() && Lambda[0].rows() == 1; }
  /// λ_i for scalar μ.
  Expr lambda(int i) const { return Lambda.at(i)(0, 0); }
  /// The horizontal one-form λ_i dx^i (scalar μ only).
  DifferentialForm form(const JetContext& ctx) const;
  int jet_order() const;
};

/// Λ_i = −(D_i K) K^{-1}: the μ for which K conjugates μ-prolongation to the
/// standard one.
MuForm pure_gauge_mu(const ExprMatrix& K, const JetContext& ctx);

enum class ProlongKind { Standard, Lambda, Mu };
enum class Execution { Serial, Parallel };

using ProlongTable = std::map<std::pair<int, MultiIndex>, Expr>;

/// Coefficients Ψ^a_J for all |J| <= order, with the recipe needed to extend.
class ProlongedField {
 public:
  ProlongedField() = default;

  const PointVectorField& base() const { return base_; }
  const JetContext& context() const { return ctx_; }
  ProlongKind kind() const { return kind_; }
  const MuForm& mu() const { return mu_; }
  int order() const { return order_; }
  const ProlongTable& table() const { return table_; }

  /// Ψ^a_J; J = ∅ gives φ^a. Throws std::out_of_range beyond order().
  const Expr& coefficient(int a, const MultiIndex& J) const;
  /// ξ^i ∂_{x^i} + Σ_{|J|<=order} Ψ^a_J ∂_{u^a_J}.
  JetVectorField vector_field() const;
  /// Same field prolonged to order k >= order().
  ProlongedField extend(int k, Execution exec = Execution::Parallel) const;
  /// Replaces one coefficient (used to build perturbed fields in tests).
  ProlongedField with_coefficient(int a, const MultiIndex& J, const Expr& value) const;

 private:
  friend ProlongedField make_prolonged(const JetContext&, const PointVectorField&, ProlongKind, MuForm, int,
                                       Execution);
  friend ProlongedField gauge_factored_prolong(const JetContext&, const std::vector<Expr>&, const ExprMatrix&, int);
  void grow(int k, Execution exec);

  JetContext ctx_;
  PointVectorField base_;
  ProlongKind kind_ = ProlongKind::Standard;
  MuForm mu_;
  int order_ = 0;
  ProlongTable table_;
};

ProlongedField standard_prolong(const JetContext& ctx, const PointVectorField& X, int k,
                                Execution exec = Execution::Parallel);
/// Ψ_{j+1} = (D_x + λ)Ψ_j − u_{j+1}(D_x + λ)ξ for each component (one
/// independent variable). λ of jet order above 1 requires `allow_higher_jets`.
ProlongedField lambda_prolong(const JetContext& ctx, const PointVectorField& X, const Expr& lambda, int k,
                              bool allow_higher_jets = false, Execution exec = Execution::Parallel);
/// Ψ^a_{J,i} = (∇_i)^a_b Ψ^b_J − u^b_{J,m}(∇_i)^a_b ξ^m with ∇_i = I D_i + Λ_i.
ProlongedField mu_prolong(const JetContext& ctx, const PointVectorField& X, const MuForm& mu, int k,
                          Execution exec = Execution::Parallel);
/// F^a_J = Ψ^a_J − Φ^a_J against the standard prolongation. Vector μ only for k <= 1.
ProlongTable difference_terms(const JetContext& ctx, const PointVectorField& X, const MuForm& mu, int k);
/// Ψ^a_J = [K · D_J(K^{-1} Q)]^a, recorded with μ = pure_gauge_mu(K).
ProlongedField gauge_factored_prolong(const JetContext& ctx, const std::vector<Expr>& Q, const ExprMatrix& K, int k);

/// Memo statistics for the prolongation cache.
struct ProlongCacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
};
ProlongCacheStats prolong_cache_stats();
void clear_prolong_cache();

}  // namespace twistsym
