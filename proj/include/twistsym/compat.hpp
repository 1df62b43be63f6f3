#pragma once

#include <optional>
#include <vector>

#include "twistsym/jet.hpp"
#include "twistsym/matrix.hpp"
#include "twistsym/prolong.hpp"
#include "twistsym/verdict.hpp"

namespace twistsym {

enum class Compatibility { Everywhere, OnSolutions, Incompatible, Undecided };
const char* to_string(Compatibility c);

struct CompatibilityPair {
  int i = 0;
  int k = 0;
  ExprMatrix residual;            // D_iΛ_k − D_kΛ_i + [Λ_i, Λ_k]
  std::optional<ExprMatrix> restricted;  // on S_Δ when an equation is supplied
};

struct CompatibilityReport {
  Compatibility verdict = Compatibility::Everywhere;
  std::vector<CompatibilityPair> pairs;
};

/// Horizontal Maurer–Cartan check for μ = Λ_i dx^i, optionally restricted to
/// the solutions of `sys`.
CompatibilityReport maurer_cartan_check(const MuForm& mu, const JetContext& ctx, const SolvedSystem* sys = nullptr);

/// Antiderivative of f with respect to the symbol `var` over the
/// polynomial / log / exp(linear) fragment; nullopt outside it.
std::optional<Expr> integrate_elementary(const Expr& f, const Expr& var);

/// Φ with D_iΦ = λ_i for a scalar μ, or nullopt when none is found in the
/// elementary fragment. Throws std::invalid_argument when μ is not closed.
std::optional<Expr> find_potential(const MuForm& mu, const JetContext& ctx);

/// Entries of D_iK + Λ_iK for every i. Throws std::domain_error for singular K.
Verdict gauge_factor_check(const ExprMatrix& K, const MuForm& mu, const JetContext& ctx);

}  // namespace twistsym
