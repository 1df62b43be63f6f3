#include "twistsym/symmetry.hpp"

#include <set>
#include <stdexcept>

namespace twistsym {

JetVectorField lie_bracket(const JetVectorField& X, const JetVectorField& Y) {
  std::vector<Expr> coords;
  for (const auto& [k, v] : X.components()) coords.push_back(k);
  for (const auto& [k, v] : Y.components()) coords.push_back(k);
  JetVectorField out;
  for (const auto& c : coords) {
    if (!out.get(c).is_zero()) continue;
    out.set(c, X.apply(Y.get(c)) - Y.apply(X.get(c)));
  }
  return out;
}

JetVectorField as_vector_field(const PointVectorField& X, const JetContext& ctx) {
  JetVectorField v;
  for (int i = 0; i < ctx.p(); ++i) v.set(ctx.x(i), X.xi[i]);
  for (int a = 0; a < ctx.q(); ++a) v.set(ctx.u(a), X.phi[a]);
  return v;
}

PointVectorField lie_bracket(const PointVectorField& X, const PointVectorField& Y, const JetContext& ctx) {
  JetVectorField b = lie_bracket(as_vector_field(X, ctx), as_vector_field(Y, ctx));
  std::vector<Expr> xi, phi;
  for (int i = 0; i < ctx.p(); ++i) xi.push_back(b.get(ctx.x(i)));
  for (int a = 0; a < ctx.q(); ++a) phi.push_back(b.get(ctx.u(a)));
  return PointVectorField{xi, phi, X.generalized || Y.generalized};
}

ProlongedField twisted_prolong(const JetContext& ctx, const PointVectorField& X, const Twist& twist, int k) {
  switch (twist.kind) {
    case Twist::Kind::None:
      return standard_prolong(ctx, X, k);
    case Twist::Kind::Lambda:
      return lambda_prolong(ctx, X, twist.lambda, k, true);
    case Twist::Kind::Mu:
      return mu_prolong(ctx, X, twist.mu, k);
  }
  throw std::logic_error("unknown twist");
}

Verdict check_symmetry(const SolvedSystem& sys, const PointVectorField& X, const Twist& twist, std::optional<int> k) {
  const int order = sys.order();
  if (k && *k != order)
    throw std::invalid_argument("prolongation order " + std::to_string(*k) + " does not match equation order " +
                                std::to_string(order));
  const JetContext& ctx = sys.context();
  ProlongedField Y = twisted_prolong(ctx, X, twist, order);
  JetVectorField field = Y.vector_field();
  Verdict v;
  for (std::size_t e = 0; e < sys.equations().size(); ++e) {
    const auto& eq = sys.equations()[e];
    Expr r = sys.restrict(field.apply(sys.residual(e)));
    v.add(ctx.jet(eq.dep, eq.lead).str(), r);
  }
  return v;
}

namespace {

void add_form(Verdict& v, const std::string& label, const DifferentialForm& f) {
  if (f.is_zero()) {
    v.add(label, Expr(0), ZeroTest::Yes);
    return;
  }
  for (const auto& [basis, c] : f.terms()) {
    std::string l = label + ":d" + basis[0].coordinate.str();
    v.add(l, c);
  }
}

}  // namespace

Verdict geometric_characterization(const ProlongedField& Y, const MuForm& mu) {
  const JetContext& ctx = Y.context();
  if (static_cast<int>(mu.Lambda.size()) != ctx.p()) throw std::invalid_argument("μ needs one matrix per independent variable");
  JetVectorField field = Y.vector_field();
  Verdict v;
  for (int n = 0; n < Y.order(); ++n)
    for (const auto& J : MultiIndex::of_order(ctx.p(), n))
      for (int a = 0; a < ctx.q(); ++a) {
        DifferentialForm theta = DifferentialForm::contact(ctx, a, J);
        DifferentialForm beta = lie(field, theta, ctx);
        for (int i = 0; i < ctx.p(); ++i)
          for (int b = 0; b < ctx.q(); ++b) {
            const Expr& lab = mu.Lambda[i](a, b);
            if (lab.is_zero()) continue;
            Expr contraction = interior(field, DifferentialForm::contact(ctx, b, J), ctx).scalar_part();
            beta = beta + (lab * contraction) * DifferentialForm::d(ctx.x(i));
          }
        DifferentialForm h = beta.contact_reduce(ctx).horizontal_part();
        add_form(v, "theta(" + ctx.jet(a, J).str() + ")", h);
      }
  return v;
}

Verdict lambda_commutation_check(const ProlongedField& Y, const Expr& lambda) {
  const JetContext& ctx = Y.context();
  if (ctx.p() != 1) throw std::invalid_argument("commutation check needs one independent variable");
  const Expr& xi = Y.base().xi[0];
  Expr bx = -total_derivative(xi, 0, ctx) - lambda * xi;
  Verdict v;
  for (int j = 0; j < Y.order(); ++j) {
    MultiIndex J(std::vector<int>(static_cast<std::size_t>(j), 0));
    MultiIndex Jn = J.plus(0);
    for (int a = 0; a < ctx.q(); ++a) {
      const Expr& psi = Y.coefficient(a, J);
      // [Y, D_x] has x-component −D_x ξ and u_j-component Ψ_{j+1} − D_xΨ_j
      Expr bu = Y.coefficient(a, Jn) - total_derivative(psi, 0, ctx) - lambda * psi;
      Expr r = bu - ctx.jet(a, Jn) * bx;
      v.add("theta(" + ctx.jet(a, J).str() + ")", r);
    }
  }
  return v;
}

ExponentialReport exponential_correspondence(const SolvedSystem& sys, const PointVectorField& X0,
                                             const std::vector<Expr>& P, std::optional<Expr> f) {
  const JetContext& ctx = sys.context();
  if (static_cast<int>(P.size()) != ctx.p()) throw std::invalid_argument("P needs one component per independent variable");
  for (int i = 0; i < ctx.p(); ++i)
    for (int j = i + 1; j < ctx.p(); ++j) {
      Expr c = sys.restrict(total_derivative(P[j], i, ctx) - total_derivative(P[i], j, ctx));
      if (is_zero(c) == ZeroTest::No)
        throw std::invalid_argument("P is not closed on solutions: pair (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ")");
    }
  ExponentialReport r;
  if (f) {
    for (int i = 0; i < ctx.p(); ++i)
      if (is_zero(total_derivative(*f, i, ctx) - P[i]) != ZeroTest::Yes)
        throw std::invalid_argument("supplied potential does not satisfy D_i f = P_i");
    r.potential = *f;
    r.potential_supplied = true;
  } else {
    auto found = find_potential(MuForm::scalar(P), ctx);
    if (!found) throw std::runtime_error("no potential found for P in the elementary fragment");
    r.potential = *found;
  }
  r.lambda_verdict = check_symmetry(sys, X0, Twist::with_mu(MuForm::diagonal(P, ctx.q())));
  PointVectorField Q0 = evolutionary_rep(X0, ctx);
  Expr weight = exp(r.potential);
  for (auto& q : Q0.phi) q = weight * q;
  r.standard_verdict = check_symmetry(sys, Q0, Twist::none());
  r.agree = r.lambda_verdict.outcome == r.standard_verdict.outcome;
  return r;
}

Verdict lambda_liouville_check(const std::vector<Expr>& F, const std::vector<Expr>& Z, const Expr& lambda,
                               const JetContext& ctx, bool companion) {
  const int n = ctx.q();
  if (ctx.p() != 1) throw std::invalid_argument("Liouville check needs one independent variable");
  if (static_cast<int>(F.size()) != n || static_cast<int>(Z.size()) != n)
    throw std::invalid_argument("dynamical system and field must have one component per dependent variable");
  std::vector<Expr> div_terms;
  for (int b = 0; b < n; ++b) div_terms.push_back(diff(F[b], ctx.u(b)));
  Expr div = add(div_terms);
  Verdict v;
  for (int a = 0; a < n; ++a) {
    std::vector<Expr> t{diff(Z[a], ctx.x(0)), lambda * Z[a]};
    for (int b = 0; b < n; ++b) {
      t.push_back(F[b] * diff(Z[a], ctx.u(b)));
      t.push_back(-(Z[b] * diff(F[a], ctx.u(b))));
    }
    if (!companion) t.push_back(div * Z[a]);
    v.add(ctx.u(a).str(), add(t));
  }
  return v;
}

std::optional<Expr> search_lambda(const SolvedSystem& sys, const PointVectorField& X, int degree, int range) {
  const JetContext& ctx = sys.context();
  if (ctx.p() != 1) throw std::invalid_argument("λ search needs one independent variable");
  std::vector<Expr> vars{ctx.x(0)};
  for (int a = 0; a < ctx.q(); ++a) vars.push_back(ctx.u(a));
  for (int a = 0; a < ctx.q(); ++a) vars.push_back(ctx.jet(a, MultiIndex({0})));
  // monomials of degree <= degree
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
  auto try_lambda = [&](const Expr& lam) {
    try {
      return check_symmetry(sys, X, Twist::with_lambda(lam)).holds();
    } catch (const std::exception&) {
      return false;
    }
  };
  if (try_lambda(Expr(0))) return Expr(0);
  // one or two nonzero coefficients
  for (std::size_t i = 0; i < monos.size(); ++i)
    for (int ci = -range; ci <= range; ++ci) {
      if (ci == 0) continue;
      Expr li = Expr(ci) * monos[i];
      if (try_lambda(li)) return li;
    }
  for (std::size_t i = 0; i < monos.size(); ++i)
    for (std::size_t j = i + 1; j < monos.size(); ++j)
      for (int ci = -range; ci <= range; ++ci)
        for (int cj = -range; cj <= range; ++cj) {
          if (ci == 0 || cj == 0) continue;
          Expr lam = Expr(ci) * monos[i] + Expr(cj) * monos[j];
          if (try_lambda(lam)) return lam;
        }
  return std::nullopt;
}

}  // namespace twistsym
