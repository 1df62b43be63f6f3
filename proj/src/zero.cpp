#include <cmath>
#include <map>
#include <random>

#include "expr_internal.hpp"

namespace twistsym {

const char* to_string(ZeroTest z) {
  switch (z) {
    case ZeroTest::Yes:
      return "yes";
    case ZeroTest::No:
      return "no";
    case ZeroTest::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

// Denominator as a product of normalized sums raised to positive integer powers.
using DenFactors = std::map<Expr, std::int64_t, ExprLess>;

struct Frac {
  Expr num;
  DenFactors den;
};

Expr expand_den(const DenFactors& d) {
  Expr acc(1);
  for (const auto& [s, k] : d) acc = acc * pow(s, Rational(k));
  return acc;
}

Expr scale_to(const Frac& f, const DenFactors& common) {
  Expr acc = f.num;
  for (const auto& [s, k] : common) {
    auto it = f.den.find(s);
    std::int64_t have = it == f.den.end() ? 0 : it->second;
    if (k > have) acc = acc * pow(s, Rational(k - have));
  }
  return acc;
}

Frac fraction(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Power: {
      const Rational& r = e.exponent();
      if (e.base().kind() == NodeKind::Sum && r.is_integer() && r.is_negative())
        return {Expr(1), DenFactors{{e.base(), -r.num()}}};
      return {e, {}};
    }
    case NodeKind::Product: {
      Frac acc{Expr(e.scalar()), {}};
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        Frac f = fraction(pow(e.children()[i], e.weights()[i]));
        acc.num = acc.num * f.num;
        for (const auto& [s, k] : f.den) acc.den[s] += k;
      }
      return acc;
    }
    case NodeKind::Sum: {
      std::vector<Frac> parts;
      DenFactors common;
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        Frac f = fraction(e.children()[i]);
        f.num = Expr(e.weights()[i]) * f.num;
        for (const auto& [s, k] : f.den) common[s] = std::max(common[s], k);
        parts.push_back(std::move(f));
      }
      std::vector<Expr> terms;
      terms.push_back(Expr(e.scalar()) * expand_den(common));
      for (const auto& p : parts) terms.push_back(scale_to(p, common));
      return {add(terms), common};
    }
    default:
      return {e, {}};
  }
}

/// True when every factor base of every term is a symbol or an opaque kernel
/// application, so distinct canonical monomials are linearly independent.
bool pure_polynomial(const Expr& n) {
  auto atom_ok = [](const Expr& b) {
    return b.kind() == NodeKind::Sym || (b.kind() == NodeKind::Function && b.func_kind() == FuncKind::Opaque);
  };
  auto mono_ok = [&](const Expr& m) {
    if (m.kind() == NodeKind::Number) return true;
    Rational c(1);
    std::vector<Factor> fs;
    monomial_of(m, c, fs);
    for (const auto& [b, e] : fs)
      if (!atom_ok(b)) return false;
    return true;
  };
  if (n.kind() == NodeKind::Sum) {
    for (const auto& t : n.children())
      if (!mono_ok(t)) return false;
    return true;
  }
  return mono_ok(n);
}

double magnitude(const Expr& n, const Valuation& v) {
  if (n.kind() != NodeKind::Sum) return std::fabs(evaluate(n, v));
  double s = std::fabs(n.scalar().to_double());
  for (std::size_t i = 0; i < n.children().size(); ++i)
    s += std::fabs(n.weights()[i].to_double() * evaluate(n.children()[i], v));
  return s;
}

}  // namespace

Fraction to_fraction(const Expr& e) {
  Frac f = fraction(e);
  return {f.num, expand_den(f.den)};
}

namespace {

/// Lowest exponent of each symbol over the terms of a sum (or one monomial).
void lowest_powers(const Expr& n, std::map<Expr, Rational, ExprLess>& low) {
  auto visit = [&](const Expr& m) {
    if (m.kind() == NodeKind::Number) return;
    Rational c(1);
    std::vector<Factor> fs;
    monomial_of(m, c, fs);
    for (const auto& [b, e] : fs) {
      if (b.kind() != NodeKind::Sym || !e.is_negative()) continue;
      auto it = low.find(b);
      if (it == low.end() || compare(e, it->second) < 0) low[b] = e;
    }
  };
  if (n.kind() == NodeKind::Sum)
    for (const auto& t : n.children()) visit(t);
  else
    visit(n);
}

}  // namespace

Expr normal_form(const Expr& e) {
  Fraction f = to_fraction(e);
  std::map<Expr, Rational, ExprLess> low;
  lowest_powers(f.num, low);
  lowest_powers(f.den, low);
  Expr lift(1);
  for (const auto& [b, r] : low) lift = lift * pow(b, -r);
  return (f.num * lift) / (f.den * lift);
}

ZeroTest is_zero(const Expr& e) {
  if (e.is_zero()) return ZeroTest::Yes;
  if (e.is_number()) return ZeroTest::No;
  Fraction f;
  try {
    f = to_fraction(e);
  } catch (const std::overflow_error&) {
    f = {e, Expr(1)};
  }
  if (f.num.is_zero()) return ZeroTest::Yes;
  if (pure_polynomial(f.num)) return ZeroTest::No;

  std::mt19937_64 rng(0x7457u);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  for (int trial = 0; trial < 4; ++trial) {
    std::map<std::string, double> values;
    ExprMap<double> kernels;
    Valuation v;
    v.symbol = [&](const Symbol& s) {
      std::string key = s.display + "#" + std::to_string(static_cast<int>(s.role));
      auto it = values.find(key);
      if (it != values.end()) return it->second;
      double x = dist(rng);
      values.emplace(key, x);
      return x;
    };
    v.opaque = [&](const Expr& app) {
      auto it = kernels.find(app);
      if (it != kernels.end()) return it->second;
      double x = dist(rng);
      kernels.emplace(app, x);
      return x;
    };
    double d = evaluate(f.den, v);
    if (!std::isfinite(d) || d == 0.0) continue;
    double n = evaluate(f.num, v);
    double scale = std::max(1.0, magnitude(f.num, v));
    if (std::isfinite(n) && std::isfinite(scale) && std::fabs(n) > 1e-8 * scale) return ZeroTest::No;
  }
  return ZeroTest::Unknown;
}

}  // namespace twistsym
