#include <benchmark/benchmark.h>

#include "twistsym/numcheck.hpp"
#include "twistsym/prolong.hpp"

using namespace twistsym;

namespace {

JetContext context(int p, int q, int order) {
  Declarations d;
  d.independent = p == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
  d.dependent = q == 1 ? std::vector<std::string>{"u"} : std::vector<std::string>{"u", "v"};
  return JetContext(d, order);
}

PointVectorField field(const JetContext& ctx) {
  const char* xs[] = {"x^2*u+x", "x*u-u^2"};
  const char* ps[] = {"u*x+u^2", "u*v-x"};
  std::vector<Expr> xi, phi;
  for (int i = 0; i < ctx.p(); ++i) xi.push_back(ctx.parse(xs[i]));
  for (int a = 0; a < ctx.q(); ++a) phi.push_back(ctx.parse(ps[a]));
  return make_field(ctx, xi, phi);
}

void run_mu(benchmark::State& state, Execution exec) {
  const int p = static_cast<int>(state.range(0));
  const int order = static_cast<int>(state.range(1));
  auto ctx = context(p, 2, order);
  auto X = field(ctx);
  MuForm mu;
  for (int i = 0; i < p; ++i) {
    ExprMatrix m(2, 2);
    m(0, 0) = ctx.parse("x");
    m(0, 1) = ctx.parse("u");
    m(1, 1) = Expr(i + 1);
    mu.Lambda.push_back(m);
  }
  for (auto _ : state) {
    clear_prolong_cache();
    auto Y = mu_prolong(ctx, X, mu, order, exec);
    benchmark::DoNotOptimize(Y.table().size());
  }
}

void BM_MuProlongSerial(benchmark::State& state) { run_mu(state, Execution::Serial); }
void BM_MuProlongParallel(benchmark::State& state) { run_mu(state, Execution::Parallel); }

void run_sample(benchmark::State& state, bool parallel) {
  auto ctx = context(1, 1, 3);
  SolvedSystem sys(ctx, {SolvedEquation{0, MultiIndex(std::vector<int>{0, 0}), ctx.parse("-u-u^3/10")}});
  auto traj = rk4_integrate(sys, {1.0, 0.2}, 1e-3, static_cast<double>(state.range(0)));
  Expr e = ctx.parse("exp(x/10)*(u_x^2+u^2)/2+sin(u)*u_xx-cos(x)*u_xxx");
  for (auto _ : state) benchmark::DoNotOptimize(sample(e, ctx, traj, parallel));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(traj.size()));
}

void BM_SampleSerial(benchmark::State& state) { run_sample(state, false); }
void BM_SampleParallel(benchmark::State& state) { run_sample(state, true); }

}  // namespace

BENCHMARK(BM_MuProlongSerial)->Args({1, 4})->Args({2, 3})->Args({2, 4})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MuProlongParallel)->Args({1, 4})->Args({2, 3})->Args({2, 4})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SampleSerial)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleParallel)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
