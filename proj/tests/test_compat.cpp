#include "random_fields.hpp"
#include "test_util.hpp"
#include "twistsym/compat.hpp"

using namespace twistsym;
using namespace twistsym::testing;

namespace {

MultiIndex mi(std::initializer_list<int> l) { return MultiIndex(std::vector<int>(l)); }

ExprMatrix constant(std::initializer_list<std::initializer_list<int>> rows) {
  std::vector<Expr> data;
  int r = 0, c = 0;
  for (const auto& row : rows) {
    ++r;
    c = static_cast<int>(row.size());
    for (int v : row) data.emplace_back(v);
  }
  return ExprMatrix(r, c, data);
}

}  // namespace

TEST_CASE("maurer-cartan examples") {
  auto ctx = pde_context();
  Expr phi = ctx.parse("x*y");
  auto exact = MuForm::scalar({total_derivative(phi, 0, ctx), total_derivative(phi, 1, ctx)});
  CHECK(maurer_cartan_check(exact, ctx).verdict == Compatibility::Everywhere);

  Declarations d;
  d.independent = {"x", "y"};
  d.dependent = {"u", "v"};
  JetContext two(d, 2);
  MuForm mu{{constant({{0, 1}, {0, 0}}), constant({{1, 0}, {0, -1}})}};
  auto r = maurer_cartan_check(mu, two);
  CHECK(r.verdict == Compatibility::Incompatible);
  REQUIRE(r.pairs.size() == 1);
  CHECK(r.pairs[0].residual == constant({{0, -2}, {0, 0}}));

  auto ode = ode_context();
  auto single = maurer_cartan_check(MuForm::scalar({ode.parse("u*x")}), ode);
  CHECK(single.verdict == Compatibility::Everywhere);
  CHECK(single.pairs.empty());
}

TEST_CASE("maurer-cartan on solutions only") {
  auto ctx = pde_context();
  // D_x(u_x) − D_y(u) = u_xx − u_y vanishes on the heat equation only
  SolvedSystem heat(ctx, {SolvedEquation{0, mi({1}), ctx.parse("u_xx")}});
  auto mu = MuForm::scalar({ctx.parse("u"), ctx.parse("u_x")});
  CHECK(maurer_cartan_check(mu, ctx).verdict == Compatibility::Incompatible);
  auto r = maurer_cartan_check(mu, ctx, &heat);
  CHECK(r.verdict == Compatibility::OnSolutions);
  REQUIRE(r.pairs[0].restricted.has_value());
  CHECK(r.pairs[0].restricted->is_zero());
}

TEST_CASE("pure gauge forms are flat") {
  TestRng rng(71);
  Declarations d;
  d.independent = {"x", "y"};
  d.dependent = {"u", "v"};
  JetContext ctx(d, 2);
  auto vars = base_coordinates(ctx);
  for (int trial = 0; trial < 6; ++trial) {
    Expr p1 = rng.poly(vars, 2, 2), p2 = rng.poly(vars, 2, 3), p3 = rng.poly(vars, 1, 2);
    ExprMatrix K(2, 2, {exp(p1), p2, Expr(0), exp(p3)});
    auto mu = pure_gauge_mu(K, ctx);
    CHECK(maurer_cartan_check(mu, ctx).verdict == Compatibility::Everywhere);
    CHECK(gauge_factor_check(K, mu, ctx).holds());
  }
}

TEST_CASE("find_potential examples") {
  auto ctx = ode_context();
  CHECK(find_potential(MuForm::scalar({ctx.parse("2*x")}), ctx) == ctx.parse("x^2"));
  CHECK(find_potential(MuForm::scalar({Expr(0)}), ctx) == Expr(0));
  CHECK(find_potential(MuForm::scalar({ctx.parse("u_x")}), ctx) == ctx.parse("u"));
  CHECK(find_potential(MuForm::scalar({ctx.parse("u_x/u")}), ctx) == ctx.parse("log(u)"));
  CHECK_FALSE(find_potential(MuForm::scalar({ctx.parse("u")}), ctx).has_value());
  auto pde = pde_context();
  CHECK_THROWS_AS(find_potential(MuForm::scalar({pde.parse("y"), Expr(0)}), pde), std::invalid_argument);
}

TEST_CASE("find_potential inverts the total derivative on polynomials") {
  TestRng rng(72);
  for (auto ctx : {ode_context(1, 4), ode_context(2, 4), pde_context(3)}) {
    auto vars = ctx.coordinates(1);
    for (int trial = 0; trial < 20; ++trial) {
      Expr phi = rng.poly(vars, 3, 4);
      std::vector<Expr> lam;
      for (int i = 0; i < ctx.p(); ++i) lam.push_back(total_derivative(phi, i, ctx));
      auto found = find_potential(MuForm::scalar(lam), ctx);
      REQUIRE(found.has_value());
      CHECK((*found - phi).is_number());
    }
  }
}

TEST_CASE("gauge factor examples") {
  auto ctx = ode_context();
  auto dx = MuForm::scalar({Expr(1)});
  CHECK(gauge_factor_check(ExprMatrix::scalar(1, exp(-ctx.x(0))), dx, ctx).holds());
  CHECK(gauge_factor_check(ExprMatrix::identity(1), MuForm::zero(ctx), ctx).holds());
  auto bad = gauge_factor_check(ExprMatrix::identity(1), dx, ctx);
  CHECK(bad.outcome == Outcome::No);
  CHECK(bad.residuals[0] == Expr(1));
  CHECK_THROWS_AS(gauge_factor_check(ExprMatrix(1, 1), dx, ctx), std::domain_error);
}

TEST_CASE("a gauge factor turns mu prolongation into the conjugated standard one") {
  TestRng rng(73);
  auto ctx = ode_context(2, 4);
  auto vars = base_coordinates(ctx);
  for (int trial = 0; trial < 4; ++trial) {
    ExprMatrix K(2, 2, {exp(rng.poly(vars, 1, 2)), rng.poly(vars, 1, 2), Expr(0), Expr(1)});
    auto mu = pure_gauge_mu(K, ctx);
    REQUIRE(gauge_factor_check(K, mu, ctx).holds());
    std::vector<Expr> Q{rng.poly(vars, 2, 2), rng.poly(vars, 2, 2)};
    int k = rng.integer(1, 3);
    auto g = gauge_factored_prolong(ctx, Q, K, k);
    auto m = mu_prolong(ctx, PointVectorField{{Expr(0)}, Q, true}, mu, k);
    for (int n = 0; n <= k; ++n)
      for (const auto& J : MultiIndex::of_order(1, n))
        for (int a = 0; a < 2; ++a) CHECK(is_zero(g.coefficient(a, J) - m.coefficient(a, J)) == ZeroTest::Yes);
  }
}
