#include <cmath>
#include <numbers>
#include <sstream>

#include "random_fields.hpp"
#include "test_util.hpp"
#include "twistsym/numcheck.hpp"

using namespace twistsym;
using namespace twistsym::testing;

namespace {

SolvedSystem ode(const JetContext& ctx, int order, const char* rhs) {
  return SolvedSystem(ctx, {SolvedEquation{0, MultiIndex(std::vector<int>(order, 0)), ctx.parse(rhs)}});
}

double oscillator_error(double h) {
  auto ctx = ode_context();
  auto traj = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.0}, h, 2 * std::numbers::pi);
  const auto& end = traj.values.back()[0];
  double x = traj.x.back();
  return std::max(std::abs(end[0] - std::cos(x)), std::abs(end[1] + std::sin(x)));
}

}  // namespace

TEST_CASE("rk4 examples") {
  auto ctx = ode_context();
  auto osc = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.0}, 0.01, 2 * std::numbers::pi);
  CHECK_FALSE(osc.truncated);
  CHECK(std::abs(osc.x.back() - 2 * std::numbers::pi) < 0.01);
  CHECK(std::abs(osc.values.back()[0][0] - 1.0) <= 1e-7);

  auto flat = rk4_integrate(ode(ctx, 1, "0"), {2.5}, 0.1, 1.0);
  for (const auto& pt : flat.values) CHECK(pt[0][0] == 2.5);

  auto growth = rk4_integrate(ode(ctx, 1, "u"), {1.0}, 0.01, 1.0);
  CHECK(std::abs(growth.values.back()[0][0] - std::numbers::e) <= 1e-8);
  CHECK(growth.size() == 101);
}

TEST_CASE("rk4 derivative slots follow the equation") {
  auto ctx = ode_context();
  auto traj = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.0}, 0.01, 1.0);
  REQUIRE(traj.slots == 4);
  for (const auto& pt : traj.values) {
    CHECK(pt[0][2] == doctest::Approx(-pt[0][0]));
    CHECK(pt[0][3] == doctest::Approx(-pt[0][1]));
    CHECK(pt[0][4] == doctest::Approx(pt[0][0]));
  }
}

TEST_CASE("rk4 systems and truncation") {
  auto two = ode_context(2);
  SolvedSystem sys(two, {SolvedEquation{0, MultiIndex({0}), two.parse("v")}, SolvedEquation{1, MultiIndex({0}), two.parse("-u")}});
  auto traj = rk4_integrate(sys, {0.0, 1.0}, 0.01, 1.0);
  CHECK(traj.values.back()[0][0] == doctest::Approx(std::sin(1.0)).epsilon(1e-8));
  CHECK(traj.values.back()[1][0] == doctest::Approx(std::cos(1.0)).epsilon(1e-8));

  auto ctx = ode_context();
  auto blow = rk4_integrate(ode(ctx, 1, "1/(1-x)"), {0.0}, 0.25, 2.0);
  CHECK(blow.truncated);
  CHECK_FALSE(blow.diagnostic.empty());
  CHECK(blow.size() < 9);
  CHECK_THROWS_AS(rk4_integrate(ode(ctx, 1, "u"), {1.0}, -0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rk4_integrate(ode(ctx, 2, "u"), {1.0}, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("rk4 is fourth order") {
  double e1 = oscillator_error(0.02), e2 = oscillator_error(0.01);
  double ratio = e1 / e2;
  CHECK(ratio >= 12);
  CHECK(ratio <= 20);
}

TEST_CASE("verify_along examples") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto osc = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.5}, 0.01, 10.0);
  CHECK(verify_along(P("(u_x^2+u^2)/2"), ctx, osc, AlongMode::Constant, 1e-6).pass);
  auto hyp = rk4_integrate(ode(ctx, 2, "u"), {1.0, 0.3}, 0.01, 3.0);
  CHECK(verify_along(P("u_xx-u"), ctx, hyp, AlongMode::Zero, 1e-8).pass);
  CHECK_FALSE(verify_along(P("u_x-u"), ctx, hyp, AlongMode::Constant, 1e-3).pass);
  CHECK(verify_along(P("exp(x)*(u_x-u)"), ctx, hyp, AlongMode::Constant, 1e-6).pass);
  CHECK(verify_along(P("u_xx-u_x+u_x-u"), ctx, hyp, AlongMode::Zero, 1e-6).pass);
  auto shallow = rk4_integrate(ode(ctx, 2, "u"), {1.0, 0.3}, 0.01, 1.0, 0.0, 2);
  CHECK_THROWS_AS(verify_along(P("u_xxx"), ctx, shallow, AlongMode::Zero, 1e-6), std::invalid_argument);
}

TEST_CASE("finite difference checks") {
  auto ctx = ode_context();
  auto P = [&](const char* s) { return ctx.parse(s); };
  auto osc = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.0}, 0.01, 3.0);
  CHECK(finite_difference_check(P("u^2"), ctx, osc, 1e-5).pass);
  auto xr = finite_difference_check(P("x"), ctx, osc, 1e-12);
  CHECK(xr.pass);
  CHECK(finite_difference_check(P("u_x"), ctx, osc, 1e-5).pass);
}

TEST_CASE("parallel and serial sampling agree") {
  auto ctx = ode_context();
  auto traj = rk4_integrate(ode(ctx, 2, "-u"), {1.0, 0.2}, 0.001, 5.0);
  Expr e = ctx.parse("sin(u)*u_x^3+x*u_xx");
  CHECK(sample(e, ctx, traj, true) == sample(e, ctx, traj, false));
}

TEST_CASE("csv output") {
  auto ctx = ode_context(1, 2);
  auto traj = rk4_integrate(ode(ctx, 1, "u"), {1.0}, 0.5, 1.0);
  std::ostringstream os;
  write_csv(os, ctx, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,u,u_x,u_xx");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
}
