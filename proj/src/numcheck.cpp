#include "twistsym/numcheck.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace twistsym {

namespace {

MultiIndex xs(int j) { return MultiIndex(std::vector<int>(static_cast<std::size_t>(j), 0)); }

/// Reads x and jets u^a_j from a flat state (x, then u^a_0..u^a_{m_a−1}).
class PointValuation {
 public:
  PointValuation(std::vector<int> width) : width_(std::move(width)) {
    offset_.push_back(0);
    for (int w : width_) offset_.push_back(offset_.back() + w);
  }

  Valuation bind(double x, const double* state) const {
    Valuation v;
    v.symbol = [this, x, state](const Symbol& s) -> double {
      if (s.role == SymbolRole::Independent) return x;
      if (s.role == SymbolRole::Jet) {
        int j = s.multi.order();
        if (j < width_[static_cast<std::size_t>(s.index)]) return state[offset_[static_cast<std::size_t>(s.index)] + j];
        throw std::invalid_argument("no derivative slot for " + s.display);
      }
      throw std::domain_error("parameter '" + s.display + "' has no numeric value");
    };
    return v;
  }

  int total() const { return offset_.back(); }
  int offset(int a) const { return offset_[static_cast<std::size_t>(a)]; }

 private:
  std::vector<int> width_;
  std::vector<int> offset_;
};

double eval_at(const Expr& e, const Trajectory& traj, std::size_t k, const PointValuation& pv) {
  std::vector<double> flat;
  for (int a = 0; a < traj.q; ++a)
    for (int j = 0; j <= traj.slots; ++j) flat.push_back(traj.values[k][static_cast<std::size_t>(a)][static_cast<std::size_t>(j)]);
  return evaluate(e, pv.bind(traj.x[k], flat.data()));
}

PointValuation slots_valuation(const Trajectory& traj) {
  return PointValuation(std::vector<int>(static_cast<std::size_t>(traj.q), traj.slots + 1));
}

double state_scale(const Trajectory& traj) {
  double s = 1.0;
  for (const auto& pt : traj.values)
    for (const auto& a : pt)
      for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

Trajectory rk4_integrate(const SolvedSystem& sys, const std::vector<double>& init, double h, double T, double x0,
                         int slots) {
  const JetContext& ctx = sys.context();
  if (ctx.p() != 1) throw std::invalid_argument("numeric integration needs one independent variable");
  if (!(h > 0) || !(T > 0)) throw std::invalid_argument("step and horizon must be positive");
  const int q = ctx.q();
  std::vector<int> order(static_cast<std::size_t>(q), -1);
  std::vector<Expr> rhs(static_cast<std::size_t>(q));
  for (const auto& eq : sys.equations()) {
    if (order[static_cast<std::size_t>(eq.dep)] >= 0) throw std::invalid_argument("one equation per dependent variable");
    order[static_cast<std::size_t>(eq.dep)] = eq.lead.order();
  }
  for (int a = 0; a < q; ++a)
    if (order[static_cast<std::size_t>(a)] < 1) throw std::invalid_argument("every dependent variable needs an equation");
  if (slots < 0) slots = ctx.order();
  for (int a = 0; a < q; ++a) slots = std::max(slots, order[static_cast<std::size_t>(a)]);
  for (int a = 0; a < q; ++a) rhs[static_cast<std::size_t>(a)] = sys.restrict(ctx.jet(a, xs(order[static_cast<std::size_t>(a)])));
  // higher derivative slots from differential consequences
  std::vector<std::vector<Expr>> extra(static_cast<std::size_t>(q));
  for (int a = 0; a < q; ++a)
    for (int j = order[static_cast<std::size_t>(a)]; j <= slots; ++j) extra[static_cast<std::size_t>(a)].push_back(sys.restrict(ctx.jet(a, xs(j))));

  PointValuation pv(order);
  const int n = pv.total();
  if (static_cast<int>(init.size()) != n)
    throw std::invalid_argument("initial data needs " + std::to_string(n) + " values");

  auto field = [&](double x, const std::vector<double>& s, std::vector<double>& out) {
    Valuation v = pv.bind(x, s.data());
    for (int a = 0; a < q; ++a) {
      int o = pv.offset(a), m = order[static_cast<std::size_t>(a)];
      for (int j = 0; j + 1 < m; ++j) out[static_cast<std::size_t>(o + j)] = s[static_cast<std::size_t>(o + j + 1)];
      out[static_cast<std::size_t>(o + m - 1)] = evaluate(rhs[static_cast<std::size_t>(a)], v);
    }
  };

  Trajectory traj;
  traj.q = q;
  traj.slots = slots;
  auto record = [&](double x, const std::vector<double>& s) {
    Valuation v = pv.bind(x, s.data());
    std::vector<std::vector<double>> pt(static_cast<std::size_t>(q));
    for (int a = 0; a < q; ++a) {
      int o = pv.offset(a), m = order[static_cast<std::size_t>(a)];
      for (int j = 0; j < m; ++j) pt[static_cast<std::size_t>(a)].push_back(s[static_cast<std::size_t>(o + j)]);
      for (const auto& e : extra[static_cast<std::size_t>(a)]) pt[static_cast<std::size_t>(a)].push_back(evaluate(e, v));
    }
    for (const auto& a : pt)
      for (double d : a)
        if (!std::isfinite(d)) return false;
    traj.x.push_back(x);
    traj.values.push_back(std::move(pt));
    return true;
  };

  // keep the grid uniform and land on T: shrink h to T / ceil(T / h)
  auto steps = static_cast<long>(std::llround(T / h));
  if (std::abs(static_cast<double>(steps) * h - T) > 1e-12 * T) {
    steps = static_cast<long>(std::ceil(T / h));
    h = T / static_cast<double>(steps);
  }
  traj.h = h;
  std::vector<double> s = init, k1(init.size()), k2(init.size()), k3(init.size()), k4(init.size()), tmp(init.size());
  try {
    if (!record(x0, s)) {
      traj.truncated = true;
      traj.diagnostic = "non-finite value at the initial point";
      return traj;
    }
    for (long step = 0; step < steps; ++step) {
      double x = x0 + static_cast<double>(step) * h;
      field(x, s, k1);
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
      field(x + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
      field(x + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + h * k3[i];
      field(x + h, tmp, k4);
      for (std::size_t i = 0; i < s.size(); ++i) s[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!record(x0 + static_cast<double>(step + 1) * h, s)) {
        traj.truncated = true;
        traj.diagnostic = "non-finite value at x = " + std::to_string(x + h);
        break;
      }
    }
  } catch (const std::exception& e) {
    traj.truncated = true;
    traj.diagnostic = e.what();
  }
  return traj;
}

std::vector<double> sample(const Expr& e, const JetContext& ctx, const Trajectory& traj, bool parallel) {
  if (jet_order(e) > traj.slots) throw std::invalid_argument("expression needs more derivative slots than the trajectory has");
  (void)ctx;
  PointValuation pv = slots_valuation(traj);
  std::vector<double> out(traj.size());
  const long n = static_cast<long>(traj.size());
  std::string error;
#pragma omp parallel for schedule(static) if (parallel && n > 64)
  for (long k = 0; k < n; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = eval_at(e, traj, static_cast<std::size_t>(k), pv);
    } catch (const std::exception& ex) {
#pragma omp critical
      error = ex.what();
    }
  }
  if (!error.empty()) throw std::domain_error(error);
  return out;
}

NumericReport verify_along(const Expr& e, const JetContext& ctx, const Trajectory& traj, AlongMode mode, double tol) {
  auto vals = sample(e, ctx, traj);
  NumericReport r;
  r.tol = tol;
  r.points = vals.size();
  if (vals.empty()) return r;
  if (mode == AlongMode::Constant) {
    double e0 = vals.front();
    for (double v : vals) r.max_deviation = std::max(r.max_deviation, std::abs(v - e0));
    r.scale = std::max(std::abs(e0), 1.0);
    r.max_deviation /= r.scale;
    r.pass = r.max_deviation <= tol;
  } else {
    for (double v : vals) r.max_deviation = std::max(r.max_deviation, std::abs(v));
    r.scale = state_scale(traj);
    r.pass = r.max_deviation <= tol * r.scale;
  }
  if (std::isnan(r.max_deviation)) r.pass = false;
  return r;
}

NumericReport finite_difference_check(const Expr& e, const JetContext& ctx, const Trajectory& traj, double tol) {
  Expr de = total_derivative(e, 0, ctx);
  auto vals = sample(e, ctx, traj);
  auto dvals = sample(de, ctx, traj);
  NumericReport r;
  r.tol = tol;
  for (double d : dvals) r.scale = std::max(r.scale, std::abs(d));
  // five-point central stencil
  for (std::size_t k = 2; k + 2 < vals.size(); ++k) {
    double fd = (vals[k - 2] - 8 * vals[k - 1] + 8 * vals[k + 1] - vals[k + 2]) / (12 * traj.h);
    r.max_deviation = std::max(r.max_deviation, std::abs(fd - dvals[k]));
    ++r.points;
  }
  r.max_deviation /= r.scale;
  r.pass = r.points > 0 && r.max_deviation <= tol && !std::isnan(r.max_deviation);
  return r;
}

void write_csv(std::ostream& os, const JetContext& ctx, const Trajectory& traj) {
  os << ctx.x(0).str();
  for (int a = 0; a < traj.q; ++a)
    for (int j = 0; j <= traj.slots; ++j) os << ',' << ctx.jet(a, xs(j)).str();
  os << '\n';
  os.precision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << traj.x[k];
    for (const auto& a : traj.values[k])
      for (double v : a) os << ',' << v;
    os << '\n';
  }
}

}  // namespace twistsym
