#include "twistsym/compat.hpp"

#include <stdexcept>

#include "expr_internal.hpp"

namespace twistsym {

const char* to_string(Compatibility c) {
  switch (c) {
    case Compatibility::Everywhere:
      return "compatible everywhere";
    case Compatibility::OnSolutions:
      return "compatible on solutions only";
    case Compatibility::Incompatible:
      return "incompatible";
    case Compatibility::Undecided:
      return "undecided";
  }
  return "undecided";
}

namespace {

ZeroTest matrix_zero(const ExprMatrix& m) {
  ZeroTest worst = ZeroTest::Yes;
  for (const auto& e : m.data()) {
    ZeroTest z = is_zero(e);
    if (z == ZeroTest::No) return ZeroTest::No;
    if (z == ZeroTest::Unknown) worst = ZeroTest::Unknown;
  }
  return worst;
}

ExprMatrix total_derivative(const ExprMatrix& m, int i, const JetContext& ctx) {
  return m.map([&](const Expr& e) { return twistsym::total_derivative(e, i, ctx); });
}

}  // namespace

CompatibilityReport maurer_cartan_check(const MuForm& mu, const JetContext& ctx, const SolvedSystem* sys) {
  if (static_cast<int>(mu.Lambda.size()) != ctx.p())
    throw std::invalid_argument("μ needs one matrix per independent variable");
  CompatibilityReport r;
  ZeroTest plain = ZeroTest::Yes;
  ZeroTest on = ZeroTest::Yes;
  auto worsen = [](ZeroTest& acc, ZeroTest z) {
    if (z == ZeroTest::No || acc == ZeroTest::No)
      acc = ZeroTest::No;
    else if (z == ZeroTest::Unknown)
      acc = ZeroTest::Unknown;
  };
  for (int i = 0; i < ctx.p(); ++i)
    for (int k = i + 1; k < ctx.p(); ++k) {
      const ExprMatrix& Li = mu.Lambda[i];
      const ExprMatrix& Lk = mu.Lambda[k];
      CompatibilityPair pr;
      pr.i = i;
      pr.k = k;
      pr.residual = total_derivative(Lk, i, ctx) - total_derivative(Li, k, ctx) + commutator(Li, Lk);
      worsen(plain, matrix_zero(pr.residual));
      if (sys) {
        pr.restricted = pr.residual.map([&](const Expr& e) { return sys->restrict(e); });
        worsen(on, matrix_zero(*pr.restricted));
      }
      r.pairs.push_back(std::move(pr));
    }
  if (plain == ZeroTest::Yes) {
    r.verdict = Compatibility::Everywhere;
  } else if (sys && on == ZeroTest::Yes) {
    r.verdict = Compatibility::OnSolutions;
  } else if ((sys ? on : plain) == ZeroTest::No) {
    r.verdict = Compatibility::Incompatible;
  } else {
    r.verdict = Compatibility::Undecided;
  }
  return r;
}

namespace {

std::optional<Expr> integrate_monomial(const Rational& coef, const Expr& mono, const Expr& var) {
  const Symbol& v = var.symbol();
  Rational c = coef;
  std::vector<Factor> fs;
  monomial_of(mono, c, fs);
  std::vector<Expr> rest;
  std::optional<Rational> power;
  std::optional<Expr> exp_factor;
  for (const auto& [b, e] : fs) {
    if (!depends_on(b, v)) {
      rest.push_back(pow(b, e));
      continue;
    }
    if (b == var && !power) {
      power = e;
      continue;
    }
    if (b.kind() == NodeKind::Function && b.func_kind() == FuncKind::Exp && e.is_one() && !exp_factor) {
      exp_factor = b;
      continue;
    }
    return std::nullopt;
  }
  rest.push_back(Expr(c));
  Expr r = mul(rest);
  if (exp_factor) {
    if (power) return std::nullopt;
    Expr slope = diff(exp_factor->children()[0], v);
    if (!slope.is_number() || slope.is_zero()) return std::nullopt;
    return r * *exp_factor / slope;
  }
  Rational n = power.value_or(Rational(0));
  if (n == Rational(-1)) return r * log(var);
  return r * pow(var, n + Rational(1)) / Expr(n + Rational(1));
}

}  // namespace

std::optional<Expr> integrate_elementary(const Expr& f, const Expr& var) {
  if (!var.is_symbol()) throw std::invalid_argument("integration variable must be a symbol");
  if (f.kind() != NodeKind::Sum) {
    if (f.is_number()) return f * var;
    return integrate_monomial(Rational(1), f, var);
  }
  std::vector<Expr> parts{Expr(f.scalar()) * var};
  for (std::size_t k = 0; k < f.children().size(); ++k) {
    auto t = integrate_monomial(f.weights()[k], f.children()[k], var);
    if (!t) return std::nullopt;
    parts.push_back(*t);
  }
  return add(parts);
}

std::optional<Expr> find_potential(const MuForm& mu, const JetContext& ctx) {
  if (!mu.is_scalar()) throw std::invalid_argument("potential search needs a scalar μ");
  auto report = maurer_cartan_check(mu, ctx);
  if (report.verdict == Compatibility::Incompatible)
    throw std::invalid_argument("μ is not closed: D_iλ_k ≠ D_kλ_i");
  std::vector<Expr> R;
  for (int i = 0; i < ctx.p(); ++i) R.push_back(mu.lambda(i));
  Expr phi(0);
  constexpr int kMaxSteps = 64;
  for (int step = 0; step < kMaxSteps; ++step) {
    int top = -2;
    int at = -1;
    for (int i = 0; i < ctx.p(); ++i) {
      if (R[i].is_zero()) continue;
      int o = jet_order(R[i]);
      if (o > top) top = o, at = i;
    }
    if (at < 0) break;
    const Expr& Ri = R[at];
    std::optional<Expr> G;
    if (top <= 0) {
      // no derivative jets: only ∂_i Φ contributes
      G = integrate_elementary(Ri, ctx.x(at));
    } else {
      Expr w;
      for (const auto& s : free_symbols(Ri)) {
        const Symbol& sym = s.symbol();
        if (sym.role == SymbolRole::Jet && sym.multi.order() == top) {
          w = s;
          break;
        }
      }
      const Symbol& ws = w.symbol();
      if (ws.multi.count(at) == 0) return std::nullopt;
      Expr c = diff(Ri, ws);
      if (jet_order(c) >= top) return std::nullopt;
      G = integrate_elementary(c, ctx.jet(ws.index, ws.multi.minus(MultiIndex({at}))));
    }
    if (!G) return std::nullopt;
    phi += *G;
    for (int i = 0; i < ctx.p(); ++i) R[i] = R[i] - total_derivative(*G, i, ctx);
  }
  for (int i = 0; i < ctx.p(); ++i)
    if (is_zero(total_derivative(phi, i, ctx) - mu.lambda(i)) != ZeroTest::Yes) return std::nullopt;
  return phi;
}

Verdict gauge_factor_check(const ExprMatrix& K, const MuForm& mu, const JetContext& ctx) {
  if (!K.square() || K.rows() != ctx.q()) throw std::invalid_argument("gauge factor must be q×q");
  if (is_zero(K.det()) == ZeroTest::Yes) throw std::domain_error("gauge factor is singular");
  if (static_cast<int>(mu.Lambda.size()) != ctx.p())
    throw std::invalid_argument("μ needs one matrix per independent variable");
  Verdict v;
  for (int i = 0; i < ctx.p(); ++i) {
    ExprMatrix r = total_derivative(K, i, ctx) + mu.Lambda[i] * K;
    for (int a = 0; a < r.rows(); ++a)
      for (int b = 0; b < r.cols(); ++b)
        v.add("D_" + ctx.x(i).str() + "K+Lambda_" + ctx.x(i).str() + "K[" + std::to_string(a + 1) + "," +
                  std::to_string(b + 1) + "]",
              r(a, b));
  }
  return v;
}

}  // namespace twistsym
