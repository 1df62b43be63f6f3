#include <cmath>

#include "random_fields.hpp"
#include "test_util.hpp"
#include "twistsym/numcheck.hpp"
#include "twistsym/reduce.hpp"

using namespace twistsym;
using namespace twistsym::testing;

namespace {

SolvedSystem ode(const JetContext& ctx, int order, const char* rhs) {
  return SolvedSystem(ctx, {SolvedEquation{0, MultiIndex(std::vector<int>(order, 0)), ctx.parse(rhs)}});
}

PointVectorField point(const JetContext& ctx, const char* xi, const char* phi) {
  return make_field(ctx, {ctx.parse(xi)}, {ctx.parse(phi)});
}

/// Evaluates the reduced right-hand side along a trajectory of the original
/// equation and compares it with finite differences of ζ against η.
double reduced_relation_error(const SolvedSystem& sys, const Reduction& red, const Expr& eta, const std::vector<double>& init) {
  const auto& ctx = sys.context();
  auto traj = rk4_integrate(sys, init, 1e-3, 1.0, 1.0);
  REQUIRE_FALSE(traj.truncated);
  const int n = sys.order();
  std::vector<std::vector<double>> tower;
  for (const auto& t : red.tower) tower.push_back(sample(t, ctx, traj));
  auto etas = sample(eta, ctx, traj);
  const Expr& G = red.reduced->equations()[0].rhs;
  double worst = 0;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    Valuation v;
    v.symbol = [&](const Symbol& s) -> double {
      if (s.role == SymbolRole::Independent) return etas[k];
      return tower[static_cast<std::size_t>(s.multi.order())][k];
    };
    double g = evaluate(G, v);
    const auto& top = tower[static_cast<std::size_t>(n - 2)];
    double fd = (top[k + 1] - top[k - 1]) / (etas[k + 1] - etas[k - 1]);
    worst = std::max(worst, std::abs(fd - g) / std::max(1.0, std::abs(g)));
  }
  return worst;
}

}  // namespace

TEST_CASE("verify_invariant examples") {
  auto ctx = ode_context();
  auto Y = lambda_prolong(ctx, point(ctx, "0", "1"), Expr(1), 2);
  CHECK(verify_invariant(Y, ctx.parse("x")).holds());
  CHECK(verify_invariant(Y, ctx.parse("u_x-u")).holds());
  auto bad = verify_invariant(Y, ctx.parse("u"));
  CHECK(bad.outcome == Outcome::No);
  CHECK(bad.residuals[0] == Expr(1));
  CHECK(verify_invariant(Y, ctx.parse("u_xxx-u_xx")).holds());
}

TEST_CASE("ibd_next examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto Y = lambda_prolong(ctx, point(ctx, "0", "1"), Expr(1), 2);
  auto s = ibd_next(Y, P("x"), P("u_x-u"));
  CHECK(s.rho == P("u_xx-u_x"));
  CHECK(s.verdict.holds());
  CHECK(ibd_next(Y, P("x"), P("x")).rho == Expr(1));
  auto dx = standard_prolong(ctx, point(ctx, "1", "0"), 2);
  auto t = ibd_next(dx, P("u"), P("u_x"));
  CHECK(t.rho == P("u_xx/u_x"));
  CHECK(t.verdict.holds());
  CHECK_THROWS_AS(ibd_next(Y, Expr(3), P("u_x-u")), std::domain_error);
}

TEST_CASE("ibd tower stays invariant") {
  auto ctx = ode_context(1, 5);
  TestRng rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    Expr lam = rng.poly({ctx.x(0)}, 2, 3);
    auto Y = lambda_prolong(ctx, point(ctx, "0", "1"), lam, 1);
    // η = x; with λ free of u, ζ = u_x − λu solves Y(ζ) = 0
    Expr eta = ctx.x(0), zeta = ctx.jet(0, MultiIndex({0})) - lam * ctx.u(0);
    REQUIRE(verify_invariant(Y, zeta).holds());
    for (int k = 0; k < 3; ++k) {
      auto s = ibd_next(Y, eta, zeta);
      CHECK(s.verdict.holds());
      zeta = s.rho;
    }
  }
}

TEST_CASE("reduce_order examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto dU = point(ctx, "0", "1");
  auto lin = ode(ctx, 2, "u");
  auto r = reduce_order(lin, dU, Expr(1), P("x"), P("u_x-u"));
  REQUIRE(r.ok);
  CHECK(r.reduced->equations()[0].rhs == r.context->parse("-w"));
  CHECK(r.reduced->equations()[0].lead.order() == 1);

  auto free = reduce_order(ode(ctx, 2, "0"), dU, Expr(0), P("x"), P("u_x"));
  REQUIRE(free.ok);
  CHECK(free.reduced->equations()[0].rhs.is_zero());

  CHECK_THROWS_AS(reduce_order(lin, dU, Expr(1), P("x"), P("u_x")), std::invalid_argument);
  CHECK_THROWS_AS(reduce_order(lin, dU, Expr(0), P("x"), P("u_x-u")), std::invalid_argument);
}

TEST_CASE("reduce_order eliminates through either base coordinate") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto euler = reduce_order(ode(ctx, 2, "-u_x/x"), point(ctx, "0", "1"), Expr(0), P("x"), P("u_x"));
  REQUIRE(euler.ok);
  CHECK(euler.reduced->equations()[0].rhs == euler.context->parse("-w/y"));
  auto autonomous = reduce_order(ode(ctx, 2, "u_x^2/u"), point(ctx, "1", "0"), Expr(0), P("u"), P("u_x"));
  REQUIRE(autonomous.ok);
  CHECK(autonomous.reduced->equations()[0].rhs == autonomous.context->parse("w/y"));
  auto third = reduce_order(ode(ctx, 3, "u_xx"), point(ctx, "0", "1"), Expr(0), P("x"), P("u_x"));
  REQUIRE(third.ok);
  CHECK(third.reduced->equations()[0].rhs == third.context->parse("w_y"));
}

TEST_CASE("reduce_order reports elimination failure") {
  auto ctx = ode_context();
  auto r = reduce_order(ode(ctx, 2, "u_x"), point(ctx, "0", "1"), Expr(0), ctx.parse("x"), ctx.parse("u_x^2"));
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.failure.empty());
}

TEST_CASE("reduced equations hold along numerical solutions") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  struct Case {
    const char* rhs;
    int order;
    const char* xi;
    const char* phi;
    const char* lambda;
    const char* eta;
    const char* zeta;
  };
  std::vector<Case> cases{{"u", 2, "0", "1", "1", "x", "u_x-u"},
                          {"-u_x/x", 2, "0", "1", "0", "x", "u_x"},
                          {"u_x^2/u", 2, "1", "0", "0", "u", "u_x"},
                          {"u_xx", 3, "0", "1", "0", "x", "u_x"}};
  for (const auto& c : cases) {
    auto sys = ode(ctx, c.order, c.rhs);
    auto red = reduce_order(sys, point(ctx, c.xi, c.phi), P(c.lambda), P(c.eta), P(c.zeta));
    REQUIRE(red.ok);
    for (const auto& init : {std::vector<double>{0.7, 1.3, 0.4}, std::vector<double>{1.5, -0.2, 0.9}}) {
      std::vector<double> data(init.begin(), init.begin() + c.order);
      CHECK(reduced_relation_error(sys, red, P(c.eta), data) < 1e-6);
    }
  }
}

TEST_CASE("lambda change of variables") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  CHECK(lambda_change_of_variables(P("u*x"), P("x"), ctx) == P("u*x"));
  CHECK(lambda_change_of_variables(P("u"), P("2*x"), ctx) == P("u/2"));
  CHECK(lambda_change_of_variables(P("u_x"), P("u"), ctx) == Expr(1));
  CHECK_THROWS_AS(lambda_change_of_variables(P("u"), Expr(5), ctx), std::domain_error);

  Declarations d;
  d.independent = {"t"};
  d.dependent = {"u"};
  JetContext tctx(d, 2);
  TestRng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    Expr y = rng.poly({ctx.x(0)}, 2, 3) + ctx.x(0);
    Expr w = rng.poly({tctx.x(0)}, 2, 3) + tctx.x(0);
    Expr lam = rng.poly({ctx.x(0), ctx.u(0)}, 2, 2);
    if (is_zero(total_derivative(y, 0, ctx)) == ZeroTest::Yes) continue;
    if (is_zero(total_derivative(w, 0, tctx)) == ZeroTest::Yes) continue;
    Expr step1 = lambda_change_of_variables(lam, y, ctx);
    Expr dw = substitute(total_derivative(w, 0, tctx), tctx.x(0), y);
    Expr composed = lambda_change_of_variables(lam, substitute(w, tctx.x(0), y), ctx);
    CHECK(is_zero(step1 / dw - composed) == ZeroTest::Yes);
  }
}

TEST_CASE("rho matrices") {
  auto two = ode_context(2);
  auto P = [&](const char* s) { return two.parse(s); };
  SolvedSystem sys(two, {SolvedEquation{0, MultiIndex({0}), P("v")}, SolvedEquation{1, MultiIndex({0}), P("u")}});
  auto X = make_field(two, {Expr(0)}, {P("u"), P("v")});
  auto zero = rho_matrices(sys, X, ExprMatrix(2, 2, {Expr(0), Expr(0), Expr(0), Expr(0)}), {P("x"), P("u-v"), P("x")});
  CHECK(zero.splits);
  for (const auto& m : zero.M) CHECK(m.is_zero());
  auto diag = rho_matrices(sys, X, ExprMatrix::identity(2), {P("x"), P("u/v"), P("x")});
  CHECK(diag.M[1].is_zero());
  CHECK(diag.M[0].is_zero());
  auto mixed = rho_matrices(sys, X, ExprMatrix(2, 2, {Expr(0), Expr(1), Expr(0), Expr(0)}), {P("x"), P("u"), P("v")});
  CHECK_FALSE(mixed.splits);
  CHECK(mixed.M[0] == P("v"));

  auto one = ode_context();
  SolvedSystem s1(one, {SolvedEquation{0, MultiIndex({0}), one.parse("x*u")}});
  auto r = rho_matrices(s1, make_field(one, {Expr(0)}, {one.u(0)}), ExprMatrix::identity(1), {one.x(0), one.u(0)});
  REQUIRE(r.M.size() == 1);
  CHECK(r.M[0] == one.u(0));
  CHECK_THROWS_AS(rho_matrices(s1, make_field(one, {Expr(0)}, {one.u(0)}), ExprMatrix::identity(2), {one.x(0), one.u(0)}),
                  std::invalid_argument);
}

TEST_CASE("polynomial invariant search") {
  auto ctx = ode_context();
  auto Y = lambda_prolong(ctx, point(ctx, "0", "1"), Expr(1), 1);
  auto inv = find_invariants(Y, 1);
  CHECK(inv.size() == 2);
  for (const auto& I : inv) CHECK(verify_invariant(Y, I).holds());
  auto scaling = standard_prolong(ctx, point(ctx, "x", "u"), 1);
  auto inv2 = find_invariants(scaling, 2);
  CHECK_FALSE(inv2.empty());
  for (const auto& I : inv2) CHECK(verify_invariant(scaling, I).holds());
}
