#include "twistsym/reduce.hpp"

#include <set>
#include <stdexcept>

#include "twistsym/symmetry.hpp"

namespace twistsym {

namespace {

ProlongedField covering(const ProlongedField& Y, const Expr& I) {
  int need = std::max(jet_order(I), 0);
  return need > Y.order() ? Y.extend(need) : Y;
}

/// Solves I(v) = target for v when I is affine in v.
std::optional<Expr> solve_affine(const Expr& I, const Expr& v, const Expr& target) {
  Expr a = diff(I, v.symbol());
  if (a.is_zero() || depends_on(a, v.symbol())) return std::nullopt;
  Expr b = substitute(I, v, Expr(0));
  return (target - b) / a;
}

}  // namespace

Verdict verify_invariant(const ProlongedField& Y, const Expr& I) {
  ProlongedField Z = covering(Y, I);
  Verdict v;
  v.add("Y(I)", Z.vector_field().apply(I));
  return v;
}

IbdStep ibd_next(const ProlongedField& Y, const Expr& eta, const Expr& zeta) {
  const JetContext& ctx = Y.context();
  if (ctx.p() != 1) throw std::invalid_argument("invariants by differentiation need one independent variable");
  Expr deta = total_derivative(eta, 0, ctx);
  if (is_zero(deta) == ZeroTest::Yes) throw std::domain_error("D_x eta vanishes");
  IbdStep s;
  s.rho = normal_form(total_derivative(zeta, 0, ctx) / deta);
  s.verdict = verify_invariant(Y, s.rho);
  return s;
}

Reduction reduce_order(const SolvedSystem& sys, const PointVectorField& X, const Expr& lambda, const Expr& eta,
                       const Expr& zeta, const std::string& y, const std::string& w) {
  const JetContext& ctx = sys.context();
  if (ctx.p() != 1 || ctx.q() != 1 || sys.equations().size() != 1)
    throw std::invalid_argument("order reduction needs a single scalar ODE");
  const int n = sys.order();
  if (jet_order(eta) > 0) throw std::invalid_argument("eta must not depend on derivatives");
  if (jet_order(zeta) > 1) throw std::invalid_argument("zeta must have order at most one");
  if (!check_symmetry(sys, X, Twist::with_lambda(lambda)).holds())
    throw std::invalid_argument("(X, lambda) is not a lambda-symmetry of the equation");
  ProlongedField Y = lambda_prolong(ctx, X, lambda, n, true);
  if (!verify_invariant(Y, eta).holds()) throw std::invalid_argument("eta is not an invariant");
  if (!verify_invariant(Y, zeta).holds()) throw std::invalid_argument("zeta is not an invariant");
  Expr deta = total_derivative(eta, 0, ctx);
  if (is_zero(deta) == ZeroTest::Yes) throw std::domain_error("D_x eta vanishes");

  Reduction r;
  r.tower.push_back(zeta);
  for (int k = 1; k < n; ++k) r.tower.push_back(total_derivative(r.tower.back(), 0, ctx) / deta);
  r.restricted_top = sys.restrict(r.tower.back());

  Declarations d;
  d.independent = {y};
  d.dependent = {w};
  for (const auto& name : ctx.symbols().declarations().independent)
    if (name == y || name == w) throw std::invalid_argument("reduced variable names clash with the equation");
  for (const auto& name : ctx.symbols().declarations().dependent)
    if (name == y || name == w) throw std::invalid_argument("reduced variable names clash with the equation");
  JetContext red(d, std::max(n, 1));
  auto reduced_jet = [&](int k) { return red.jet(0, MultiIndex(std::vector<int>(static_cast<std::size_t>(k), 0))); };

  // eliminate u_{n-1}, …, u_x using the tower, then one base coordinate using η
  Expr T = r.restricted_top;
  for (int k = n - 1; k >= 1; --k) {
    Expr v = ctx.jet(0, MultiIndex(std::vector<int>(static_cast<std::size_t>(k), 0)));
    if (!depends_on(T, v.symbol())) continue;
    auto s = solve_affine(r.tower[static_cast<std::size_t>(k - 1)], v, reduced_jet(k - 1));
    if (!s) {
      r.failure = "cannot solve the tower element of order " + std::to_string(k) + " for " + v.str();
      return r;
    }
    T = substitute(T, v, *s);
  }
  Expr leftover;
  std::optional<Expr> sx = solve_affine(eta, ctx.x(0), red.x(0));
  if (sx) {
    T = substitute(T, ctx.x(0), *sx);
    leftover = ctx.u(0);
  } else if (auto su = solve_affine(eta, ctx.u(0), red.x(0))) {
    T = substitute(T, ctx.u(0), *su);
    leftover = ctx.x(0);
  } else {
    r.failure = "eta is not affine in x or u";
    return r;
  }
  if (depends_on(T, leftover.symbol())) {
    if (is_zero(diff(T, leftover.symbol())) != ZeroTest::Yes) {
      r.failure = "reduced right-hand side still depends on " + leftover.str();
      return r;
    }
    T = substitute(T, leftover, Expr(1));
  }
  for (const auto& s : free_symbols(T)) {
    const Symbol& sym = s.symbol();
    bool reduced_sym = (sym.role == SymbolRole::Independent && sym.base == y) ||
                       (sym.role == SymbolRole::Jet && sym.base == w) || sym.role == SymbolRole::Parameter;
    if (!reduced_sym) {
      r.failure = "could not eliminate " + s.str();
      return r;
    }
  }
  r.ok = true;
  r.context = red;
  r.reduced = SolvedSystem(red, {SolvedEquation{0, MultiIndex(std::vector<int>(static_cast<std::size_t>(n - 1), 0)), T}});
  return r;
}

Expr lambda_change_of_variables(const Expr& lambda, const Expr& y, const JetContext& ctx) {
  if (ctx.p() != 1) throw std::invalid_argument("change of variables needs one independent variable");
  Expr dy = total_derivative(y, 0, ctx);
  if (is_zero(dy) == ZeroTest::Yes) throw std::domain_error("D_x y vanishes");
  return lambda / dy;
}

RhoReport rho_matrices(const SolvedSystem& sys, const PointVectorField& X, const ExprMatrix& Lambda,
                       const std::vector<Expr>& coords) {
  const JetContext& ctx = sys.context();
  const int n = ctx.q();
  if (ctx.p() != 1) throw std::invalid_argument("rho matrices need one independent variable");
  if (Lambda.rows() != n || Lambda.cols() != n) throw std::invalid_argument("Lambda must be n×n");
  if (static_cast<int>(coords.size()) != n + 1) throw std::invalid_argument("coordinates must be (y, w^1..w^{n-1}, z)");
  PointVectorField Q = evolutionary_rep(X, ctx);
  ExprMatrix q(n, 1);
  for (int a = 0; a < n; ++a) q(a, 0) = sys.restrict(Q.phi[a]);
  ExprMatrix LQ = Lambda * q;
  RhoReport r;
  for (int a = 1; a <= n; ++a) {
    std::vector<Expr> terms;
    for (int b = 0; b < n; ++b) terms.push_back(diff(coords[static_cast<std::size_t>(a)], ctx.u(b).symbol()) * LQ(b, 0));
    r.M.push_back(add(terms));
    if (a < n) r.verdict.add("M" + std::to_string(a), r.M.back());
  }
  r.splits = r.verdict.holds();
  return r;
}

std::vector<Expr> find_invariants(const ProlongedField& Y, int degree, int order) {
  const JetContext& ctx = Y.context();
  std::vector<Expr> vars = ctx.coordinates(order);
  std::vector<Expr> monos;
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
  ProlongedField Z = order > Y.order() ? Y.extend(order) : Y;
  JetVectorField field = Z.vector_field();
  std::vector<Expr> images(monos.size());
#pragma omp parallel for schedule(dynamic) if (monos.size() > 8)
  for (std::size_t k = 0; k < monos.size(); ++k) images[k] = field.apply(monos[k]);

  std::vector<Expr> unknowns, terms;
  for (std::size_t k = 0; k < monos.size(); ++k) {
    Symbol s;
    s.role = SymbolRole::Parameter;
    s.base = "%c" + std::to_string(k);
    s.display = s.base;
    unknowns.push_back(make_symbol(s));
    terms.push_back(unknowns.back() * images[k]);
  }
  Expr num = to_fraction(add(terms)).num;
  LinearRows rows = linear_rows(num, unknowns);
  std::vector<Expr> out;
  for (const auto& v : nullspace_rational(rows.A, monos.size())) {
    std::vector<Expr> parts;
    for (std::size_t k = 0; k < monos.size(); ++k)
      if (!v[k].is_zero()) parts.push_back(Expr(v[k]) * monos[k]);
    out.push_back(add(parts));
  }
  return out;
}

}  // namespace twistsym
