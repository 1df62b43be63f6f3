#include "random_fields.hpp"
#include "test_util.hpp"
#include "twistsym/numcheck.hpp"
#include "twistsym/variational.hpp"

using namespace twistsym;
using namespace twistsym::testing;

namespace {

PointVectorField point(const JetContext& ctx, const char* xi, const char* phi) {
  return make_field(ctx, {ctx.parse(xi)}, {ctx.parse(phi)});
}

}  // namespace

TEST_CASE("euler_lagrange examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  CHECK(euler_lagrange(P("u_x^2/2"), ctx)[0] == P("-u_xx"));
  CHECK(euler_lagrange(P("u"), ctx)[0] == Expr(1));
  CHECK(euler_lagrange(P("(u_x^2+u^2)/2"), ctx)[0] == P("u-u_xx"));
  CHECK(euler_lagrange(P("u_xx^2/2"), ctx)[0] == P("u_xxxx"));
  auto pde = pde_context();
  CHECK(euler_lagrange(pde.parse("(u_x^2+u_y^2)/2"), pde)[0] == pde.parse("-u_xx-u_yy"));
}

TEST_CASE("total derivatives are null Lagrangians") {
  TestRng rng(61);
  for (auto ctx : {ode_context(1, 4), ode_context(2, 4), pde_context(3)}) {
    auto vars = ctx.coordinates(1);
    for (int trial = 0; trial < 10; ++trial) {
      Expr F = rng.poly(vars, 3, 4);
      for (int i = 0; i < ctx.p(); ++i)
        for (const auto& e : euler_lagrange(total_derivative(F, i, ctx), ctx)) CHECK(e.is_zero());
    }
  }
}

TEST_CASE("euler_lagrange_system") {
  auto ctx = ode_context();
  auto sys = euler_lagrange_system(ctx.parse("(u_x^2+u^2)/2"), ctx);
  REQUIRE(sys.has_value());
  CHECK(sys->equations()[0].rhs == ctx.u(0));
  CHECK_FALSE(euler_lagrange_system(ctx.parse("u*u_x"), ctx).has_value());
  auto pde = pde_context();
  auto lap = euler_lagrange_system(pde.parse("(u_x^2+u_y^2)/2"), pde);
  REQUIRE(lap.has_value());
  CHECK(lap->restrict(pde.parse("u_xx+u_yy")).is_zero());
}

TEST_CASE("variational lambda-symmetry examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  CHECK(check_variational_lambda(P("(u_x^2+u^2)/2"), point(ctx, "0", "1"), Expr(1), P("u"), ctx).holds());
  CHECK(check_variational_lambda(P("u_x^2/2"), point(ctx, "1", "0"), Expr(0), Expr(0), ctx).holds());
  auto bad = check_variational_lambda(P("(u_x^2+u^2)/2"), point(ctx, "0", "1"), Expr(0), Expr(0), ctx);
  CHECK(bad.outcome == Outcome::No);
  CHECK(bad.residuals[0] == P("u"));
}

TEST_CASE("characteristic factorization examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto L = P("(u_x^2+u^2)/2");
  auto dU = point(ctx, "0", "1");
  CHECK(check_characteristic_factorization(L, dU, Expr(1), P("u-u_x"), ctx).holds());
  CHECK(check_characteristic_factorization(P("u_x^2/2"), point(ctx, "1", "0"), Expr(0), P("u_x^2/2"), ctx).holds());
  CHECK(check_characteristic_factorization(L, dU, Expr(1), P("u"), ctx).outcome == Outcome::No);
}

TEST_CASE("lambda conservation examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto r = lambda_conservation_residual(P("(u_x^2+u^2)/2"), point(ctx, "0", "1"), Expr(1), P("u"), ctx);
  CHECK(r.density[0] == P("u_x-u"));
  CHECK(r.residual == P("u_xx-u"));
  CHECK(r.restricted_available);
  CHECK(r.conserved());

  auto e = lambda_conservation_residual(P("(u_x^2-u^2)/2"), point(ctx, "1", "0"), Expr(0), Expr(0), ctx);
  CHECK(e.density[0] == P("-(u_x^2+u^2)/2"));
  CHECK(e.conserved());

  auto empty = lambda_conservation_residual(Expr(0), point(ctx, "0", "1"), P("x"), P("exp(-x^2/2)"), ctx);
  CHECK(empty.density[0] == P("-exp(-x^2/2)"));
  CHECK(empty.residual.is_zero());
  CHECK(empty.conserved());
  CHECK(lambda_conservation_residual(Expr(0), point(ctx, "0", "1"), Expr(1), P("u"), ctx).verdict.outcome !=
        Outcome::Yes);
}

TEST_CASE("the worked variational chain passes together") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto L = P("(u_x^2+u^2)/2");
  auto dU = point(ctx, "0", "1");
  CHECK(check_variational_lambda(L, dU, Expr(1), P("u"), ctx).holds());
  CHECK(check_characteristic_factorization(L, dU, Expr(1), P("u-u_x"), ctx).holds());
  CHECK(lambda_conservation_residual(L, dU, Expr(1), P("u"), ctx).conserved());
  auto B = find_gauge_term(L, dU, Expr(1), ctx);
  REQUIRE(B.has_value());
  CHECK(*B == P("u"));
  auto F = find_factorization(L, dU, Expr(1), ctx);
  REQUIRE(F.has_value());
  CHECK(*F == P("u-u_x"));
}

TEST_CASE("mu conservation examples") {
  auto pde = pde_context();
  auto dU = make_field(pde, {Expr(0), Expr(0)}, {Expr(1)});
  auto r = mu_conservation_residual(pde.parse("(u_x^2+u_y^2)/2"), dU, MuForm::zero(pde), {Expr(0), Expr(0)}, pde);
  CHECK(r.residual == pde.parse("u_xx+u_yy"));
  CHECK(r.conserved());
  auto z = mu_conservation_residual(Expr(0), dU, MuForm::scalar({pde.parse("x"), pde.parse("u")}), {Expr(0), Expr(0)}, pde);
  CHECK(z.conserved());
  MuForm matrix{{ExprMatrix::identity(2), ExprMatrix::identity(2)}};
  CHECK_THROWS_AS(mu_conservation_residual(Expr(0), dU, matrix, {Expr(0), Expr(0)}, pde), std::invalid_argument);
}

TEST_CASE("mu and lambda conservation agree for one independent variable") {
  auto ctx = ode_context();
  TestRng rng(62);
  auto vars = ctx.coordinates(1);
  for (int trial = 0; trial < 20; ++trial) {
    Expr L = rng.poly(vars, 3, 4);
    Expr lam = rng.poly(vars, 2, 2);
    Expr R = rng.poly(ctx.coordinates(0), 2, 2);
    auto X = random_point_field(rng, ctx);
    auto a = lambda_conservation_residual(L, X, lam, R, ctx);
    auto b = mu_conservation_residual(L, X, MuForm::scalar({lam}), {R}, ctx);
    CHECK(a.residual == b.residual);
    CHECK(a.verdict.outcome == b.verdict.outcome);
  }
}

TEST_CASE("untwisted noether residual is the characteristic times the euler-lagrange expression") {
  auto ctx = ode_context();
  std::vector<const char*> lagrangians{"u_x^2/2", "(u_x^2-u^2)/2", "(u_x^2+u^2)/2", "u_x^2/(2*u^2)", "x*u_x^2"};
  std::vector<std::pair<const char*, const char*>> fields{{"1", "0"}, {"0", "1"}, {"x", "u"}, {"0", "x"}, {"0", "u"}};
  int found = 0;
  for (const char* l : lagrangians)
    for (const auto& [xi, phi] : fields) {
      Expr L = ctx.parse(l);
      auto X = point(ctx, xi, phi);
      auto B = find_gauge_term(L, X, Expr(0), ctx);
      if (!B) continue;
      ++found;
      auto r = lambda_conservation_residual(L, X, Expr(0), *B, ctx);
      Expr QE = evolutionary_rep(X, ctx).phi[0] * euler_lagrange(L, ctx)[0];
      CHECK(is_zero(r.residual + QE) == ZeroTest::Yes);
      CHECK(r.conserved());
    }
  CHECK(found >= 6);
}

TEST_CASE("integrating factor examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  CHECK(integrating_factor_check(Expr(1), P("-x"), 1, Expr(1), ctx).holds());
  auto bad = integrating_factor_check(Expr(1), P("u"), 1, Expr(1), ctx);
  CHECK(bad.outcome == Outcome::No);
  CHECK(bad.residuals[0] == Expr(1));
  CHECK(integrating_factor_check(Expr(0), Expr(0), 2, P("exp(u)*x"), ctx).holds());
  // u_xx + u_x^2 = 0 with factor e^u: e^u(u_xx + u_x^2) = D_x(e^u u_x)
  CHECK(integrating_factor_check(Expr(1), P("u_x^2"), 2, P("exp(u)"), ctx).holds());
}

TEST_CASE("symbolic conservation verdicts are confirmed numerically") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  struct Case {
    const char* L;
    const char* xi;
    const char* phi;
    const char* lambda;
    const char* R;
  };
  std::vector<Case> cases{{"(u_x^2+u^2)/2", "0", "1", "1", "u"},
                          {"(u_x^2-u^2)/2", "1", "0", "0", "0"},
                          {"u_x^2/2", "0", "1", "0", "0"},
                          {"u_x^2/2", "x", "u/2", "0", "0"}};
  for (const auto& c : cases) {
    Expr L = P(c.L);
    auto rep = lambda_conservation_residual(L, point(ctx, c.xi, c.phi), P(c.lambda), P(c.R), ctx);
    REQUIRE(rep.conserved());
    auto sys = euler_lagrange_system(L, ctx);
    REQUIRE(sys.has_value());
    Expr pi = rep.density[0];
    Expr twisted = total_derivative(pi, 0, ctx) + P(c.lambda) * pi;
    for (const auto& init : {std::vector<double>{1.0, 0.3}, std::vector<double>{-0.4, 1.1}}) {
      auto traj = rk4_integrate(*sys, init, 0.01, 3.0);
      REQUIRE_FALSE(traj.truncated);
      CHECK(verify_along(twisted, ctx, traj, AlongMode::Zero, 1e-6).pass);
      if (P(c.lambda).is_zero()) CHECK(verify_along(pi, ctx, traj, AlongMode::Constant, 1e-6).pass);
    }
  }
  // a negative verdict shows up numerically
  auto wrong = lambda_conservation_residual(P("(u_x^2+u^2)/2"), point(ctx, "0", "1"), Expr(0), Expr(0), ctx);
  CHECK(wrong.verdict.outcome == Outcome::No);
  auto sys = euler_lagrange_system(P("(u_x^2+u^2)/2"), ctx);
  auto traj = rk4_integrate(*sys, {1.0, 0.3}, 0.01, 3.0);
  CHECK_FALSE(verify_along(wrong.density[0], ctx, traj, AlongMode::Constant, 1e-3).pass);
}
