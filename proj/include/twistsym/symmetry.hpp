#pragma once

#include <optional>
#include <vector>

#include "twistsym/compat.hpp"
#include "twistsym/forms.hpp"
#include "twistsym/prolong.hpp"
#include "twistsym/verdict.hpp"

namespace twistsym {

/// [X,Y]^A = X(Y^A) − Y(X^A) over the union of coordinates.
JetVectorField lie_bracket(const JetVectorField& X, const JetVectorField& Y);
/// Bracket of point fields on (x, u).
PointVectorField lie_bracket(const PointVectorField& X, const PointVectorField& Y, const JetContext& ctx);
/// The point field as a vector field on (x, u).
JetVectorField as_vector_field(const PointVectorField& X, const JetContext& ctx);

struct Twist {
  enum class Kind { None, Lambda, Mu };
  Kind kind = Kind::None;
  Expr lambda;
  MuForm mu;

  static Twist none() { return {}; }
  static Twist with_lambda(const Expr& l) { return {Kind::Lambda, l, {}}; }
  static Twist with_mu(const MuForm& m) { return {Kind::Mu, Expr(0), m}; }
};

/// Prolongation of X matching the twist.
ProlongedField twisted_prolong(const JetContext& ctx, const PointVectorField& X, const Twist& twist, int k);

/// Applies the (twisted) prolongation of X to each E^a = u^a_K − f^a and
/// restricts to S_Δ. `k` defaults to the system order; a different value is
/// an error.
Verdict check_symmetry(const SolvedSystem& sys, const PointVectorField& X, const Twist& twist,
                       std::optional<int> k = std::nullopt);

/// Every generator θ^a_J (|J| < order of Y) satisfies: the horizontal part of
/// contact_reduce(L_Yθ^a_J + Σ_{b,i} (Λ_i)^a_b (Y⌋θ^b_J) dx^i) vanishes.
Verdict geometric_characterization(const ProlongedField& Y, const MuForm& mu);

/// ([Y, D_x] − λY) ⌋ θ^a_j = 0 for j < order of Y (one independent variable).
Verdict lambda_commutation_check(const ProlongedField& Y, const Expr& lambda);

struct ExponentialReport {
  Expr potential;          // f with D_i f = P_i
  bool potential_supplied = false;
  Verdict lambda_verdict;  // X0 as a μ-symmetry with λ_i = P_i
  Verdict standard_verdict;  // vertical field e^f Q0 as a standard symmetry
  bool agree = false;
};

/// Exact-case correspondence between λ(μ)-symmetries and exponential
/// symmetries. Throws std::invalid_argument naming the pair (i,j) when P is
/// not closed on S_Δ, and std::runtime_error when no potential is found.
ExponentialReport exponential_correspondence(const SolvedSystem& sys, const PointVectorField& X0,
                                             const std::vector<Expr>& P, std::optional<Expr> f = std::nullopt);

/// (∂_x + L_F + λ)Z + (div F) Z for the system u^a_x = f^a and vertical Z on
/// (x, u); L_F Z = [f^b ∂_{u^b}, Z]. With `companion` the div F term is dropped.
Verdict lambda_liouville_check(const std::vector<Expr>& F, const std::vector<Expr>& Z, const Expr& lambda,
                               const JetContext& ctx, bool companion = false);

/// Best-effort search for a λ making X a λ-symmetry: λ = Σ c_m m over
/// monomials m of degree <= degree in (x, u, u_x) with integer c_m in
/// [-range, range]. Returns the first verified λ.
std::optional<Expr> search_lambda(const SolvedSystem& sys, const PointVectorField& X, int degree, int range = 2);

}  // namespace twistsym
