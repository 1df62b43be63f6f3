// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "random_fields.hpp"
#include "twistsym/compat.hpp"
#include "twistsym/numcheck.hpp"
#include "twistsym/reduce.hpp"
#include "twistsym/symmetry.hpp"
#include "twistsym/variational.hpp"

using namespace twistsym;
using namespace twistsym::testing;

namespace {

struct Failure {
  std::string what;
};

void expect(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

MultiIndex mi(std::initializer_list<int> l) { return MultiIndex(std::vector<int>(l)); }

SolvedSystem ode(const JetContext& ctx, int order, const char* rhs) {
  return SolvedSystem(ctx, {SolvedEquation{0, MultiIndex(std::vector<int>(order, 0)), ctx.parse(rhs)}});
}

PointVectorField point(const JetContext& ctx, const char* xi, const char* phi) {
  return make_field(ctx, {ctx.parse(xi)}, {ctx.parse(phi)});
}

std::string where(const char* what, int trial) {
  std::ostringstream os;
  os << what << " (trial " << trial << ", seed " << base_seed() << ")";
  return os.str();
}

std::string degeneration() {
  TestRng rng(101);
  auto ctx = ode_context(1, 4);
  auto pde = pde_context(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto& c = trial % 5 == 4 ? pde : ctx;
    auto X = random_point_field(rng, c, 2, 3);
    auto s = standard_prolong(c, X, 4);
    expect(mu_prolong(c, X, MuForm::zero(c), 4).table() == s.table(), where("mu = 0", trial));
    if (c.p() == 1) expect(lambda_prolong(c, X, Expr(0), 4).table() == s.table(), where("lambda = 0", trial));
  }
  return "50 fields, order 4";
}

std::string bracket_commutation() {
  TestRng rng(102);
  auto contexts = {ode_context(1, 3), ode_context(2, 3), pde_context(3)};
  int trial = 0;
  for (const auto& ctx : contexts)
    for (int n = 0; n < 9 && trial < 25; ++n, ++trial) {
      auto X = random_point_field(rng, ctx);
      auto Y = random_point_field(rng, ctx);
      auto left = standard_prolong(ctx, lie_bracket(X, Y, ctx), 3).vector_field();
      auto right = lie_bracket(standard_prolong(ctx, X, 3).vector_field(), standard_prolong(ctx, Y, 3).vector_field());
      for (const auto& c : ctx.coordinates(3)) expect(left.get(c) == right.get(c), where("bracket", trial));
    }
  return "25 pairs, order 3";
}

std::string difference_recursion() {
  TestRng rng(103);
  auto ctx = ode_context(1, 4);
  for (int trial = 0; trial < 20; ++trial) {
    auto vars = base_coordinates(ctx);
    Expr lead = Expr(1) + rng.poly(vars, 1, 1);
    while (lead.is_zero()) lead = Expr(1) + rng.poly(vars, 1, 1);
    auto X = make_field(ctx, {lead}, {rng.poly(vars, 2, 3)});
    Expr lam = rng.poly({ctx.x(0), ctx.u(0), ctx.jet(0, mi({0}))}, 1, 2);
    auto F = difference_terms(ctx, X, MuForm::scalar({lam}), 3);
    Expr Q = evolutionary_rep(X, ctx).phi[0];
    expect(F.at({0, mi({})}).is_zero(), where("F_0", trial));
    for (const auto& [key, v] : F) {
      const MultiIndex& J = key.second;
      if (J.order() == 3) continue;
      Expr expected = total_derivative(v, 0, ctx) + lam * v + lam * total_derivative(Q, J, ctx);
      expect(is_zero(F.at({0, J.plus(0)}) - expected) == ZeroTest::Yes, where("recursion", trial));
    }
    // D_J Q = 0 for all J: solve Q = 0 for u_x
    SolvedSystem inv(ctx, {SolvedEquation{0, mi({0}), X.phi[0] / lead}});
    for (const auto& [key, v] : F) expect(is_zero_on(v, inv) == ZeroTest::Yes, where("vanishing", trial));
  }
  return "20 cases, order 3";
}

std::string characterization() {
  TestRng rng(104);
  auto contexts = {ode_context(1, 3), ode_context(2, 3), pde_context(3)};
  int trial = 0;
  for (const auto& ctx : contexts) {
    auto vars = base_coordinates(ctx);
    for (int n = 0; n < 7 && trial < 20; ++n, ++trial) {
      auto X = random_point_field(rng, ctx, 1, 2);
      MuForm mu;
      if (ctx.p() == 1) {
        ExprMatrix m(ctx.q(), ctx.q());
        for (int a = 0; a < ctx.q(); ++a)
          for (int b = 0; b < ctx.q(); ++b) m(a, b) = rng.poly(vars, 1, 2);
        mu.Lambda.push_back(m);
      } else {
        mu = pure_gauge_mu(ExprMatrix::scalar(ctx.q(), exp(rng.poly(vars, 2, 3))), ctx);
      }
      auto Y = mu_prolong(ctx, X, mu, 2);
      expect(geometric_characterization(Y, mu).outcome == Outcome::Yes, where("mu_prolong", trial));
      int a = static_cast<int>(rng.pick(ctx.q()));
      auto Js = MultiIndex::of_order(ctx.p(), rng.integer(1, 2));
      const auto& J = Js[rng.pick(Js.size())];
      auto Z = Y.with_coefficient(a, J, Y.coefficient(a, J) + Expr(1));
      expect(geometric_characterization(Z, mu).outcome == Outcome::No, where("perturbation", trial));
    }
  }
  return "20 cases";
}

std::string gauge_factorization() {
  TestRng rng(105);
  int trial = 0;
  for (const auto& ctx : {ode_context(1, 3), pde_context(3)})
    for (int n = 0; n < 5; ++n, ++trial) {
      Expr f = rng.poly(base_coordinates(ctx), 2, 3);
      Expr Q = rng.poly(ctx.coordinates(1), 2, 3);
      std::vector<Expr> lam;
      for (int i = 0; i < ctx.p(); ++i) lam.push_back(total_derivative(f, i, ctx));
      MuForm mu = MuForm::scalar(lam);
      ExprMatrix K = ExprMatrix::scalar(1, exp(-f));
      auto m = mu_prolong(ctx, make_field(ctx, std::vector<Expr>(ctx.p(), Expr(0)), {Q}, true), mu, 3);
      auto g = gauge_factored_prolong(ctx, {Q}, K, 3);
      expect(m.table() == g.table(), where("gauge factored table", trial));
      // independent oracle: e^{-f} D_J(e^f Q)
      for (const auto& [key, v] : m.table())
        expect(v == exp(-f) * total_derivative(exp(f) * Q, key.second, ctx), where("closed form", trial));
      expect(maurer_cartan_check(mu, ctx).verdict == Compatibility::Everywhere, where("Maurer-Cartan", trial));
      expect(gauge_factor_check(K, mu, ctx).holds(), where("D K = -Lambda K", trial));
    }
  return "10 gauge factors, order 3";
}

std::string lambda_chain() {
  auto ctx = ode_context(1, 4);
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto sys = ode(ctx, 2, "u");
  auto X = point(ctx, "0", "1");
  expect(check_symmetry(sys, X, Twist::with_lambda(Expr(1))).outcome == Outcome::Yes, "lambda verdict");
  expect(check_symmetry(sys, X, Twist::none()).outcome == Outcome::No, "standard verdict");
  auto ex = exponential_correspondence(sys, X, {Expr(1)});
  expect(ex.potential == P("x"), "potential f = x");
  expect(ex.agree && ex.standard_verdict.outcome == Outcome::Yes, "exponential verdicts");
  auto Y = lambda_prolong(ctx, X, Expr(1), 2);
  Expr eta = P("x"), zeta = P("u_x-u");
  auto step = ibd_next(Y, eta, zeta);
  expect(verify_invariant(Y, eta).holds() && verify_invariant(Y, zeta).holds() && step.verdict.holds(), "IBD tower");
  auto red = reduce_order(sys, X, Expr(1), eta, zeta);
  expect(red.ok && red.reduced, "reduction");
  const auto& rc = *red.context;
  expect(red.reduced->equations()[0].rhs == -rc.u(0), "reduced equation dzeta/deta = -zeta");
  double worst = 0;
  for (const auto& init : {std::vector<double>{1.0, 0.3}, std::vector<double>{-0.4, 1.1}}) {
    auto traj = rk4_integrate(sys, init, 1e-3, 5.0);
    expect(!traj.truncated, "trajectory truncated");
    auto z = sample(zeta, ctx, traj);
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
      double fd = (z[k + 1] - z[k - 1]) / (traj.x[k + 1] - traj.x[k - 1]);
      worst = std::max(worst, std::abs(fd + z[k]) / std::max(1.0, std::abs(z[k])));
    }
  }
  expect(worst <= 1e-6, "numeric reduced relation " + std::to_string(worst));
  std::ostringstream os;
  os << "reduced " << red.reduced->equations()[0].rhs.str() << ", numeric deviation " << worst;
  return os.str();
}

std::string variational_chain() {
  auto ctx = ode_context(1, 4);
  auto P = [&](const char* s) { return ctx.parse(s); };
  Expr L = P("(u_x^2+u^2)/2");
  auto X = point(ctx, "0", "1");
  Expr lam(1);
  expect(check_variational_lambda(L, X, lam, P("u"), ctx).holds(), "B = u");
  expect(check_characteristic_factorization(L, X, lam, P("u-u_x"), ctx).holds(), "P = u - u_x");
  auto B = find_gauge_term(L, X, lam, ctx);
  auto Pf = find_factorization(L, X, lam, ctx);
  expect(B && *B == P("u") && Pf && *Pf == P("u-u_x"), "ansatz search");
  auto rep = lambda_conservation_residual(L, X, lam, P("u"), ctx);
  expect(rep.restricted_available && rep.restricted && rep.restricted->is_zero() && rep.conserved(),
         "conservation residual on solutions");
  auto sys = euler_lagrange_system(L, ctx);
  expect(sys.has_value(), "Euler-Lagrange system");
  Expr pi = rep.density[0];
  Expr twisted = total_derivative(pi, 0, ctx) + pi;
  double worst = 0;
  for (const auto& init : {std::vector<double>{1.0, 0.3}, std::vector<double>{-0.4, 1.1}}) {
    auto traj = rk4_integrate(*sys, init, 0.01, 10.0);
    expect(!traj.truncated, "trajectory truncated");
    for (double r : sample(twisted, ctx, traj)) worst = std::max(worst, std::abs(r));
    // finite-difference D_xΠ from the samples of Π alone
    auto p = sample(pi, ctx, traj);
    const double h = traj.h;
    for (std::size_t k = 2; k + 2 < p.size(); ++k) {
      double d = (p[k - 2] - 8 * p[k - 1] + 8 * p[k + 1] - p[k + 2]) / (12 * h);
      worst = std::max(worst, std::abs(d + p[k]));
    }
  }
  expect(worst <= 1e-6, "numeric |D_x Pi + Pi| = " + std::to_string(worst));
  std::ostringstream os;
  os << "Pi = " << pi.str() << ", max |D_x Pi + Pi| " << worst;
  return os.str();
}

std::string null_lagrangians() {
  TestRng rng(108);
  auto ctx = ode_context(1, 5);
  std::vector<Expr> vars{ctx.x(0), ctx.u(0), ctx.jet(0, mi({0}))};
  for (int trial = 0; trial < 30; ++trial) {
    Expr F = rng.poly(vars, 3, 4);
    expect(euler_lagrange(total_derivative(F, 0, ctx), ctx)[0].is_zero(), where("E(D_x F)", trial));
  }
  return "30 cases";
}

std::string maurer_cartan() {
  TestRng rng(109);
  auto ctx = pde_context(3);
  for (int trial = 0; trial < 10; ++trial) {
    Expr g = rng.poly(ctx.coordinates(1), 3, 4);
    MuForm mu = MuForm::scalar({total_derivative(g, 0, ctx), total_derivative(g, 1, ctx)});
    expect(maurer_cartan_check(mu, ctx).verdict == Compatibility::Everywhere, where("exact scalar", trial));
  }
  Declarations d;
  d.independent = {"x", "y"};
  d.dependent = {"u", "v"};
  JetContext two(d, 2);
  ExprMatrix N(2, 2), D(2, 2);
  N(0, 1) = Expr(1);
  D(0, 0) = Expr(1);
  D(1, 1) = Expr(-1);
  auto r = maurer_cartan_check(MuForm{{N, D}}, two);
  expect(r.verdict == Compatibility::Incompatible, "nilpotent/diagonal verdict");
  ExprMatrix expected(2, 2);
  expected(0, 1) = Expr(-2);
  expect(r.pairs.size() == 1 && r.pairs[0].residual == expected, "residual [[0,-2],[0,0]]");
  return "10 exact forms, nilpotent pair incompatible";
}

double oscillator_error(double h) {
  auto ctx = ode_context(1, 2);
  auto traj = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.0}, h, 2 * std::numbers::pi);
  const auto& end = traj.values.back()[0];
  double x = traj.x.back();
  return std::max(std::abs(end[0] - std::cos(x)), std::abs(end[1] + std::sin(x)));
}

std::string rk4_order() {
  double ratio = oscillator_error(0.02) / oscillator_error(0.01);
  expect(ratio >= 12 && ratio <= 20, "error ratio " + std::to_string(ratio));
  auto ctx = ode_context(1, 2);
  auto traj = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.5}, 0.01, 10.0);
  auto e = verify_along(ctx.parse("(u_x^2+u^2)/2"), ctx, traj, AlongMode::Constant, 1e-6);
  expect(e.pass, "energy drift " + std::to_string(e.max_deviation));
  std::ostringstream os;
  os << "ratio " << ratio << ", energy drift " << e.max_deviation;
  return os.str();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> criteria{
      {"degeneration of twisted prolongations", degeneration},
      {"bracket commutes with prolongation", bracket_commutation},
      {"difference recursion", difference_recursion},
      {"contact characterization of mu-prolongations", characterization},
      {"gauge factorization", gauge_factorization},
      {"lambda-symmetry chain for u_xx = u", lambda_chain},
      {"variational chain for (u_x^2+u^2)/2", variational_chain},
      {"null Lagrangians", null_lagrangians},
      {"Maurer-Cartan compatibility", maurer_cartan},
      {"RK4 order and energy", rk4_order},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    auto start = std::chrono::steady_clock::now();
    std::string status, detail;
    try {
      detail = criteria[k].second();
      status = "PASS";
    } catch (const Failure& f) {
      status = "FAIL";
      detail = f.what;
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = std::string("exception: ") + e.what();
    }
    if (status == "FAIL") ++failures;
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    std::cout << status << " " << k + 1 << " " << criteria[k].first << ": " << detail << " [" << static_cast<long>(ms)
              << " ms]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
