#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistsym/jet.hpp"
#include "twistsym/matrix.hpp"
#include "twistsym/prolong.hpp"
#include "twistsym/verdict.hpp"

namespace twistsym {

/// Single-residual verdict on Y(I). Y is extended when I has higher order.
Verdict verify_invariant(const ProlongedField& Y, const Expr& I);

struct IbdStep {
  Expr rho;         // D_xζ / D_xη
  Verdict verdict;  // Y(ρ) = 0
};

/// Invariants by differentiation. Throws std::domain_error when D_xη = 0.
IbdStep ibd_next(const ProlongedField& Y, const Expr& eta, const Expr& zeta);

struct Reduction {
  bool ok = false;
  std::string failure;        // set when elimination fails
  std::vector<Expr> tower;    // ζ, ρ_2, …, ρ_n in the original coordinates
  Expr restricted_top;        // ρ_n on S_Δ
  std::optional<JetContext> context;  // (y, w) coordinates of the reduced equation
  std::optional<SolvedSystem> reduced;  // w_{n−1} = G(y, w, …, w_{n−2})
};

/// Order reduction of a scalar ODE u_n = f by a λ-symmetry (X, λ) with
/// invariants η (order 0) and ζ (order 1). The reduced equation is written
/// with independent variable `y` and dependent variable `w`.
/// Throws std::invalid_argument when a precondition fails.
Reduction reduce_order(const SolvedSystem& sys, const PointVectorField& X, const Expr& lambda, const Expr& eta,
                       const Expr& zeta, const std::string& y = "y", const std::string& w = "w");

/// λ / D_x y. Throws std::domain_error when D_x y = 0.
Expr lambda_change_of_variables(const Expr& lambda, const Expr& y, const JetContext& ctx);

struct RhoReport {
  std::vector<Expr> M;  // M^(1), …, M^(n); the last belongs to z
  bool splits = false;  // M^(a) = 0 for a < n
  Verdict verdict;      // residuals M^(a), a < n
};

/// M^(a) = (∂w^a/∂u^b)(ΛQ)^b for the first-order system u^a_x = f^a, with Q
/// restricted to the system. `coords` is (y, w^1, …, w^{n−1}, z).
RhoReport rho_matrices(const SolvedSystem& sys, const PointVectorField& X, const ExprMatrix& Lambda,
                       const std::vector<Expr>& coords);

/// Basis of polynomial invariants of Y of degree <= degree in the jet
/// coordinates up to `order`, excluding constants.
std::vector<Expr> find_invariants(const ProlongedField& Y, int degree, int order = 1);

}  // namespace twistsym
