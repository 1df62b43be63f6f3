#pragma once

#include <optional>
#include <vector>

#include "twistsym/jet.hpp"
#include "twistsym/prolong.hpp"
#include "twistsym/verdict.hpp"

namespace twistsym {

/// E_a[L] = Σ_J (−1)^{|J|} D_J(∂L/∂u^a_J) for every dependent variable.
std::vector<Expr> euler_lagrange(const Expr& L, const JetContext& ctx);

/// The Euler–Lagrange equations of a first-order L in solved form, when the
/// second-order jets can be isolated: for p = 1 through the Hessian in u_x,
/// for q = 1 by solving the single equation for one second-order jet.
std::optional<SolvedSystem> euler_lagrange_system(const Expr& L, const JetContext& ctx);

/// Y(L) + L(D_x+λ)ξ − (D_x+λ)B with Y the λ-prolongation of X.
Verdict check_variational_lambda(const Expr& L, const PointVectorField& X, const Expr& lambda, const Expr& B,
                                 const JetContext& ctx);

/// Σ_a Q^a E_a[L] − (D_x+λ)P.
Verdict check_characteristic_factorization(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                           const Expr& P, const JetContext& ctx);

struct ConservationReport {
  std::vector<Expr> density;         // Π (one entry per independent variable)
  Expr residual;                     // before restriction
  std::optional<Expr> restricted;    // on the Euler–Lagrange solutions
  bool restricted_available = false;
  Verdict verdict;                   // on the restricted residual when available
  bool conserved() const { return verdict.holds(); }
};

/// Π = X⌋Θ − R with Θ = L dx + (∂L/∂u^a_x)θ^a; residual (D_x+λ)Π.
ConservationReport lambda_conservation_residual(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                                const Expr& R, const JetContext& ctx);

/// Σ_i (D_i+λ_i)(∂L/∂u^a_i Q^a + ξ^i L − R^i) for a scalar μ = λ_i dx^i.
ConservationReport mu_conservation_residual(const Expr& L, const PointVectorField& X, const MuForm& mu,
                                            const std::vector<Expr>& R, const JetContext& ctx);

/// Variational derivative of ρ(M + N u_n) (scalar, one independent variable).
Verdict integrating_factor_check(const Expr& N, const Expr& M, int n, const Expr& rho, const JetContext& ctx);

/// Polynomial P of degree <= degree in the coordinates up to `order` with
/// (D_x+λ)P = target identically, or nullopt.
std::optional<Expr> solve_twisted_primitive(const Expr& target, const Expr& lambda, const JetContext& ctx,
                                            int degree, int order);

/// B with Y(L) + L(D_x+λ)ξ = (D_x+λ)B, searched in the polynomial ansatz.
std::optional<Expr> find_gauge_term(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                    const JetContext& ctx, int degree = 2);
/// P with Q·E[L] = (D_x+λ)P, searched in the polynomial ansatz.
std::optional<Expr> find_factorization(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                       const JetContext& ctx, int degree = 2);

}  // namespace twistsym
