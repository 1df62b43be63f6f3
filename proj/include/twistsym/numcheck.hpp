#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "twistsym/jet.hpp"

namespace twistsym {

/// Samples of an ODE solution on a uniform grid. values[k][a][j] holds the
/// j-th x-derivative of u^a at x[k], for j <= slots.
struct Trajectory {
  std::vector<double> x;
  std::vector<std::vector<std::vector<double>>> values;
  int q = 0;
  int slots = 0;
  double h = 0;
  bool truncated = false;
  std::string diagnostic;

  std::size_t size() const { return x.size(); }
};

/// Classical RK4 for a solved ODE system u^a_{n_a} = f^a (one independent
/// variable, pure x-derivative leads). `init` lists u^a, u^a_x, …,
/// u^a_{n_a−1} for a = 1..q in order. Derivative slots up to `slots` (default:
/// the context order) are filled from the equation's differential
/// consequences. A non-finite evaluation truncates the trajectory. When T is
/// not a multiple of h the step shrinks to T / ceil(T / h).
Trajectory rk4_integrate(const SolvedSystem& sys, const std::vector<double>& init, double h, double T,
                         double x0 = 0.0, int slots = -1);

/// Values of e at every trajectory point. Parallel over points unless serial.
std::vector<double> sample(const Expr& e, const JetContext& ctx, const Trajectory& traj, bool parallel = true);

enum class AlongMode { Constant, Zero };

struct NumericReport {
  double max_deviation = 0;
  double tol = 0;
  double scale = 1;
  bool pass = false;
  std::size_t points = 0;
};

/// Constant: max |e − e(x0)| / max(|e(x0)|, 1) <= tol. Zero: max |e| <= tol·scale
/// where scale = max(1, largest sampled |u^a_j|). Throws std::invalid_argument
/// when e needs more derivative slots than the trajectory carries.
NumericReport verify_along(const Expr& e, const JetContext& ctx, const Trajectory& traj, AlongMode mode, double tol);

/// Five-point central differences of e against sampled D_x e at interior points; the
/// deviation is scaled by max(1, max |D_x e|).
NumericReport finite_difference_check(const Expr& e, const JetContext& ctx, const Trajectory& traj, double tol);

/// CSV with header x,u,u_x,… (jet display names).
void write_csv(std::ostream& os, const JetContext& ctx, const Trajectory& traj);

}  // namespace twistsym
