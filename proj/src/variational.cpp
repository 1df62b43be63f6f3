#include "twistsym/variational.hpp"

#include <set>
#include <stdexcept>

#include "twistsym/matrix.hpp"

namespace twistsym {

namespace {

Expr twisted_d(const Expr& f, const Expr& lambda, const JetContext& ctx) {
  return total_derivative(f, 0, ctx) + lambda * f;
}

void require_ode(const JetContext& ctx) {
  if (ctx.p() != 1) throw std::invalid_argument("operation needs one independent variable");
}

int lagrangian_order(const Expr& L) { return std::max(jet_order(L), 1); }

MultiIndex first(int i) { return MultiIndex(std::vector<int>{i}); }

}  // namespace

std::vector<Expr> euler_lagrange(const Expr& L, const JetContext& ctx) {
  const int n = std::max(jet_order(L), 0);
  std::vector<Expr> out;
  for (int a = 0; a < ctx.q(); ++a) {
    std::vector<Expr> terms{diff(L, ctx.u(a))};
    for (int k = 1; k <= n; ++k)
      for (const auto& J : MultiIndex::of_order(ctx.p(), k)) {
        Expr dl = diff(L, ctx.jet(a, J));
        if (dl.is_zero()) continue;
        Expr t = total_derivative(dl, J, ctx);
        terms.push_back(k % 2 ? -t : t);
      }
    out.push_back(add(terms));
  }
  return out;
}

std::optional<SolvedSystem> euler_lagrange_system(const Expr& L, const JetContext& ctx) {
  if (jet_order(L) > 1) return std::nullopt;
  auto E = euler_lagrange(L, ctx);
  auto second = [&](const Expr& e) { return jet_order(e) >= 2; };
  if (ctx.p() == 1) {
    const int q = ctx.q();
    ExprMatrix H(q, q), c(q, 1);
    for (int a = 0; a < q; ++a) {
      for (int b = 0; b < q; ++b) H(a, b) = -diff(E[a], ctx.jet(b, MultiIndex({0, 0})));
      Expr rest = E[a];
      for (int b = 0; b < q; ++b) rest = substitute(rest, ctx.jet(b, MultiIndex({0, 0})), Expr(0));
      c(a, 0) = rest;
      for (int b = 0; b < q; ++b)
        if (second(H(a, b))) return std::nullopt;
    }
    if (is_zero(H.det()) != ZeroTest::No) return std::nullopt;
    ExprMatrix sol = H.inverse() * c;
    std::vector<SolvedEquation> eqs;
    for (int a = 0; a < q; ++a) eqs.push_back({a, MultiIndex({0, 0}), sol(a, 0)});
    return SolvedSystem(ctx, eqs);
  }
  if (ctx.q() != 1) return std::nullopt;
  for (const auto& J : MultiIndex::of_order(ctx.p(), 2)) {
    Expr v = ctx.jet(0, J);
    Expr a = diff(E[0], v);
    if (a.is_zero() || second(a) || is_zero(a) != ZeroTest::No) continue;
    Expr rest = substitute(E[0], v, Expr(0));
    return SolvedSystem(ctx, {SolvedEquation{0, J, -rest / a}});
  }
  return std::nullopt;
}

Verdict check_variational_lambda(const Expr& L, const PointVectorField& X, const Expr& lambda, const Expr& B,
                                 const JetContext& ctx) {
  require_ode(ctx);
  ProlongedField Y = lambda_prolong(ctx, X, lambda, lagrangian_order(L), true);
  const Expr& xi = X.xi[0];
  Verdict v;
  v.add("variational", Y.vector_field().apply(L) + L * twisted_d(xi, lambda, ctx) - twisted_d(B, lambda, ctx));
  return v;
}

Verdict check_characteristic_factorization(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                           const Expr& P, const JetContext& ctx) {
  require_ode(ctx);
  auto E = euler_lagrange(L, ctx);
  auto Q = evolutionary_rep(X, ctx);
  std::vector<Expr> terms{-twisted_d(P, lambda, ctx)};
  for (int a = 0; a < ctx.q(); ++a) terms.push_back(Q.phi[a] * E[a]);
  Verdict v;
  v.add("factorization", add(terms));
  return v;
}

namespace {

ConservationReport finish_report(const Expr& L, const JetContext& ctx, std::vector<Expr> density, Expr residual) {
  ConservationReport r;
  r.density = std::move(density);
  r.residual = residual;
  if (auto sys = euler_lagrange_system(L, ctx)) {
    r.restricted = sys->restrict(residual);
    r.restricted_available = true;
    r.verdict.add("conservation", *r.restricted);
  } else if (is_zero(residual) == ZeroTest::Yes) {
    r.verdict.add("conservation", residual, ZeroTest::Yes);
  } else {
    r.verdict.add("conservation", residual, ZeroTest::Unknown);
  }
  return r;
}

/// Σ_a ∂L/∂u^a_i Q^a + ξ^i L − R^i
Expr current(const Expr& L, const PointVectorField& Q, const PointVectorField& X, int i, const Expr& R,
             const JetContext& ctx) {
  std::vector<Expr> t{X.xi[i] * L, -R};
  for (int a = 0; a < ctx.q(); ++a) t.push_back(diff(L, ctx.jet(a, first(i))) * Q.phi[a]);
  return add(t);
}

}  // namespace

ConservationReport lambda_conservation_residual(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                                const Expr& R, const JetContext& ctx) {
  require_ode(ctx);
  if (jet_order(L) > 1) throw std::invalid_argument("the Poincaré–Cartan form is built for first-order Lagrangians");
  auto Q = evolutionary_rep(X, ctx);
  Expr pi = current(L, Q, X, 0, R, ctx);
  return finish_report(L, ctx, {pi}, twisted_d(pi, lambda, ctx));
}

ConservationReport mu_conservation_residual(const Expr& L, const PointVectorField& X, const MuForm& mu,
                                            const std::vector<Expr>& R, const JetContext& ctx) {
  if (jet_order(L) > 1) throw std::invalid_argument("field-theory conservation needs a first-order Lagrangian");
  if (!mu.is_scalar()) throw std::invalid_argument("the conservation law contracts a scalar μ");
  if (static_cast<int>(R.size()) != ctx.p() || static_cast<int>(mu.Lambda.size()) != ctx.p())
    throw std::invalid_argument("R and μ need one component per independent variable");
  auto Q = evolutionary_rep(X, ctx);
  std::vector<Expr> density, terms;
  for (int i = 0; i < ctx.p(); ++i) {
    Expr c = current(L, Q, X, i, R[i], ctx);
    density.push_back(c);
    terms.push_back(total_derivative(c, i, ctx) + mu.lambda(i) * c);
  }
  return finish_report(L, ctx, density, add(terms));
}

Verdict integrating_factor_check(const Expr& N, const Expr& M, int n, const Expr& rho, const JetContext& ctx) {
  require_ode(ctx);
  if (ctx.q() != 1) throw std::invalid_argument("integrating factors are checked for scalar equations");
  Expr un = ctx.jet(0, MultiIndex(std::vector<int>(static_cast<std::size_t>(n), 0)));
  auto E = euler_lagrange(rho * (M + N * un), ctx);
  Verdict v;
  v.add("variational derivative", E[0]);
  return v;
}

std::optional<Expr> solve_twisted_primitive(const Expr& target, const Expr& lambda, const JetContext& ctx,
                                            int degree, int order) {
  require_ode(ctx);
  std::vector<Expr> vars = ctx.coordinates(std::max(order, 0));
  std::vector<Expr> monos{Expr(1)};
  std::set<Expr, ExprLess> seen{Expr(1)};
  std::vector<Expr> frontier{Expr(1)};
  for (int d = 1; d <= degree; ++d) {
    std::vector<Expr> next;
    for (const auto& m : frontier)
      for (const auto& v : vars) {
        Expr e = m * v;
        if (seen.insert(e).second) {
          monos.push_back(e);
          next.push_back(e);
        }
      }
    frontier = std::move(next);
  }
  std::vector<Expr> images(monos.size());
#pragma omp parallel for schedule(dynamic) if (monos.size() > 8)
  for (std::size_t k = 0; k < monos.size(); ++k) images[k] = twisted_d(monos[k], lambda, ctx);
  std::vector<Expr> unknowns, terms{-target};
  for (std::size_t k = 0; k < monos.size(); ++k) {
    Symbol s;
    s.role = SymbolRole::Parameter;
    s.base = "%p" + std::to_string(k);
    s.display = s.base;
    unknowns.push_back(make_symbol(s));
    terms.push_back(unknowns.back() * images[k]);
  }
  LinearRows rows;
  try {
    rows = linear_rows(to_fraction(add(terms)).num, unknowns);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  auto sol = solve_rational(rows.A, rows.b);
  if (!sol) return std::nullopt;
  std::vector<Expr> parts;
  for (std::size_t k = 0; k < monos.size(); ++k)
    if (!(*sol)[k].is_zero()) parts.push_back(Expr((*sol)[k]) * monos[k]);
  Expr P = add(parts);
  if (is_zero(twisted_d(P, lambda, ctx) - target) != ZeroTest::Yes) return std::nullopt;
  return P;
}

std::optional<Expr> find_gauge_term(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                    const JetContext& ctx, int degree) {
  require_ode(ctx);
  ProlongedField Y = lambda_prolong(ctx, X, lambda, lagrangian_order(L), true);
  Expr target = Y.vector_field().apply(L) + L * twisted_d(X.xi[0], lambda, ctx);
  return solve_twisted_primitive(target, lambda, ctx, degree, std::max(jet_order(target) - 1, 0));
}

std::optional<Expr> find_factorization(const Expr& L, const PointVectorField& X, const Expr& lambda,
                                       const JetContext& ctx, int degree) {
  require_ode(ctx);
  auto E = euler_lagrange(L, ctx);
  auto Q = evolutionary_rep(X, ctx);
  std::vector<Expr> t;
  for (int a = 0; a < ctx.q(); ++a) t.push_back(Q.phi[a] * E[a]);
  Expr target = add(t);
  return solve_twisted_primitive(target, lambda, ctx, degree, std::max(jet_order(target) - 1, 0));
}

}  // namespace twistsym
