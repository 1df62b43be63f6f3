#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "twistsym/expr.hpp"
#include "twistsym/jet.hpp"

namespace twistsym {

/// Vector field on jet space: coordinate symbol -> coefficient.
class JetVectorField {
 public:
  JetVectorField() = default;

  void set(const Expr& coordinate, const Expr& coefficient);
  /// Coefficient of the coordinate, 0 when absent.
  Expr get(const Expr& coordinate) const;
  /// Components sorted by coordinate.
  std::vector<std::pair<Expr, Expr>> components() const;
  bool empty() const { return comp_.empty(); }

  /// Derivation Y(f).
  Expr apply(const Expr& f) const;

  std::string str() const;

 private:
  ExprMap<Expr> comp_;
  std::uint64_t support_ = 0;
};

/// Basis one-form: d(coordinate), or the contact form θ^a_J (stored by its jet u^a_J).
struct OneForm {
  enum class Kind : std::uint8_t { D = 0, Theta = 1 };
  Kind kind = Kind::D;
  Expr coordinate;

  friend bool operator==(const OneForm& a, const OneForm& b) {
    return a.kind == b.kind && a.coordinate == b.coordinate;
  }
};
int compare(const OneForm& a, const OneForm& b);

/// Differential form with canonical coefficients on a sorted wedge basis.
class DifferentialForm {
 public:
  using Basis = std::vector<OneForm>;  // strictly increasing

  DifferentialForm() = default;
  static DifferentialForm function(const Expr& f);
  static DifferentialForm d(const Expr& coordinate);
  /// θ^a_J as a basis element; `expanded` rewrites it as du_J - u_{J,i} dx^i.
  static DifferentialForm contact(const JetContext& ctx, int a, const MultiIndex& J, bool expanded = true);
  /// Sum of c_i dx^i.
  static DifferentialForm horizontal(const JetContext& ctx, const std::vector<Expr>& coefficients);

  /// Sums duplicate bases and drops zero coefficients; bases must be sorted.
  static DifferentialForm from_terms(std::vector<std::pair<Basis, Expr>> terms);

  bool is_zero() const { return terms_.empty(); }
  /// Highest degree present, -1 for the zero form.
  int degree() const;
  DifferentialForm component(int degree) const;
  /// Zero-form value (0 if absent).
  Expr scalar_part() const;
  const std::vector<std::pair<Basis, Expr>>& terms() const { return terms_; }

  /// Rewrites θ basis elements through du_J - u_{J,i} dx^i.
  DifferentialForm expand_contact(const JetContext& ctx) const;
  /// Rewrites every du^a_L through θ^a_L + u_{L,i} dx^i.
  DifferentialForm contact_reduce(const JetContext& ctx) const;
  /// Terms whose basis contains only dx^i (call after contact_reduce).
  DifferentialForm horizontal_part() const;
  bool has_contact_basis() const;

  DifferentialForm map_coefficients(const std::function<Expr(const Expr&)>& f) const;

  friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b);
  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b);
  friend DifferentialForm operator*(const Expr& f, const DifferentialForm& a);
  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b);

  std::string str() const;

 private:
  void accumulate(Basis b, const Expr& c);
  std::vector<std::pair<Basis, Expr>> terms_;  // sorted by basis, nonzero coefficients
};

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b);
/// Exterior derivative; parameters are constants.
DifferentialForm exterior_d(const DifferentialForm& a, const JetContext& ctx);
/// Y ⌋ a. Throws std::invalid_argument when a has a nonzero 0-form part.
DifferentialForm interior(const JetVectorField& Y, const DifferentialForm& a, const JetContext& ctx);
/// Lie derivative through Cartan's formula; 0-form parts map to Y(f).
DifferentialForm lie(const JetVectorField& Y, const DifferentialForm& a, const JetContext& ctx);
/// d_μ β = dβ + μ ∧ β.
DifferentialForm deformed_d(const DifferentialForm& beta, const DifferentialForm& mu, const JetContext& ctx);
/// L^μ_Y β = L_Y β + μ ∧ (Y ⌋ β).
DifferentialForm deformed_lie(const JetVectorField& Y, const DifferentialForm& beta, const DifferentialForm& mu,
                              const JetContext& ctx);

}  // namespace twistsym
