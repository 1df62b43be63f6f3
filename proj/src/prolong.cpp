#include "twistsym/prolong.hpp"

#include <exception>
#include <list>
#include <mutex>
#include <optional>
#include <stdexcept>

namespace twistsym {

bool PointVectorField::vertical() const {
  for (const auto& e : xi)
    if (!e.is_zero()) return false;
  return true;
}

PointVectorField make_field(const JetContext& ctx, std::vector<Expr> xi, std::vector<Expr> phi, bool generalized) {
  if (static_cast<int>(xi.size()) != ctx.p()) throw std::invalid_argument("field needs one ξ per independent variable");
  if (static_cast<int>(phi.size()) != ctx.q()) throw std::invalid_argument("field needs one φ per dependent variable");
  if (!generalized) {
    for (const auto* v : {&xi, &phi})
      for (const auto& e : *v)
        if (jet_order(e) > 0)
          throw std::invalid_argument("point field coefficient depends on derivatives: " + e.str());
  }
  return PointVectorField{std::move(xi), std::move(phi), generalized};
}

PointVectorField evolutionary_rep(const PointVectorField& X, const JetContext& ctx) {
  std::vector<Expr> Q;
  for (int a = 0; a < ctx.q(); ++a) {
    std::vector<Expr> t{X.phi[a]};
    for (int i = 0; i < ctx.p(); ++i) t.push_back(-(ctx.jet(a, MultiIndex({i})) * X.xi[i]));
    Q.push_back(add(t));
  }
  return PointVectorField{std::vector<Expr>(ctx.p(), Expr(0)), std::move(Q), true};
}

// ---- μ forms ------------------------------------------------------------------------

MuForm MuForm::zero(const JetContext& ctx) {
  MuForm m;
  for (int i = 0; i < ctx.p(); ++i) m.Lambda.emplace_back(ctx.q(), ctx.q());
  return m;
}

MuForm MuForm::scalar(const std::vector<Expr>& lambdas) {
  MuForm m;
  for (const auto& l : lambdas) m.Lambda.push_back(ExprMatrix(1, 1, {l}));
  return m;
}

MuForm MuForm::diagonal(const std::vector<Expr>& lambdas, int q) {
  MuForm m;
  for (const auto& l : lambdas) m.Lambda.push_back(ExprMatrix::scalar(q, l));
  return m;
}

bool MuForm::is_zero() const {
  for (const auto& L : Lambda)
    if (!L.is_zero()) return false;
  return true;
}

DifferentialForm MuForm::form(const JetContext& ctx) const {
  if (!is_scalar()) throw std::invalid_argument("matrix-valued μ has no scalar form");
  std::vector<Expr> c;
  for (const auto& L : Lambda) c.push_back(L(0, 0));
  return DifferentialForm::horizontal(ctx, c);
}

int MuForm::jet_order() const {
  int k = -1;
  for (const auto& L : Lambda)
    for (const auto& e : L.data()) k = std::max(k, twistsym::jet_order(e));
  return k;
}

MuForm pure_gauge_mu(const ExprMatrix& K, const JetContext& ctx) {
  if (!K.square() || K.rows() != ctx.q()) throw std::invalid_argument("gauge factor must be q×q");
  ExprMatrix Kinv = K.inverse();
  MuForm m;
  for (int i = 0; i < ctx.p(); ++i) {
    ExprMatrix DK = K.map([&](const Expr& e) { return total_derivative(e, i, ctx); });
    m.Lambda.push_back(Expr(-1) * (DK * Kinv));
  }
  return m;
}

// ---- prolongation core --------------------------------------------------------------

namespace {

void check_mu(const JetContext& ctx, const MuForm& mu) {
  if (static_cast<int>(mu.Lambda.size()) != ctx.p())
    throw std::invalid_argument("μ needs one matrix per independent variable");
  for (const auto& L : mu.Lambda)
    if (L.rows() != ctx.q() || L.cols() != ctx.q())
      throw std::invalid_argument("μ matrix dimension does not match the number of dependent variables");
}

struct CacheKey {
  const SymbolTable* table;
  ProlongKind kind;
  std::vector<Expr> exprs;
  std::size_t hash;

  bool operator==(const CacheKey& o) const {
    return table == o.table && kind == o.kind && exprs == o.exprs;
  }
};

CacheKey make_key(const JetContext& ctx, const PointVectorField& X, ProlongKind kind, const MuForm& mu) {
  CacheKey k{&ctx.symbols(), kind, {}, 0};
  k.exprs = X.xi;
  k.exprs.insert(k.exprs.end(), X.phi.begin(), X.phi.end());
  for (const auto& L : mu.Lambda) k.exprs.insert(k.exprs.end(), L.data().begin(), L.data().end());
  std::size_t h = std::hash<const void*>{}(k.table) ^ (static_cast<std::size_t>(kind) * 0x9e3779b97f4a7c15ULL);
  for (const auto& e : k.exprs) h = h * 1099511628211ULL ^ e.hash();
  k.hash = h;
  return k;
}

class ProlongCache {
 public:
  static constexpr std::size_t kCapacity = 256;

  std::optional<ProlongedField> find(const CacheKey& key) {
    std::lock_guard lock(mu_);
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->first.hash == key.hash && it->first == key) {
        entries_.splice(entries_.begin(), entries_, it);
        ++stats_.hits;
        return entries_.front().second;
      }
    }
    ++stats_.misses;
    return std::nullopt;
  }

  void store(const CacheKey& key, const ProlongedField& f) {
    std::lock_guard lock(mu_);
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      if (it->first.hash == key.hash && it->first == key) {
        if (it->second.order() < f.order()) it->second = f;
        return;
      }
    }
    entries_.emplace_front(key, f);
    if (entries_.size() > kCapacity) entries_.pop_back();
  }

  ProlongCacheStats stats() {
    std::lock_guard lock(mu_);
    return stats_;
  }

  void clear() {
    std::lock_guard lock(mu_);
    entries_.clear();
    stats_ = {};
  }

 private:
  std::mutex mu_;
  std::list<std::pair<CacheKey, ProlongedField>> entries_;
  ProlongCacheStats stats_;
};

ProlongCache& cache() {
  static ProlongCache c;
  return c;
}

}  // namespace

ProlongCacheStats prolong_cache_stats() { return cache().stats(); }
void clear_prolong_cache() { cache().clear(); }

const Expr& ProlongedField::coefficient(int a, const MultiIndex& J) const {
  auto it = table_.find({a, J});
  if (it == table_.end()) throw std::out_of_range("prolongation coefficient beyond the computed order");
  return it->second;
}

JetVectorField ProlongedField::vector_field() const {
  JetVectorField Y;
  for (int i = 0; i < ctx_.p(); ++i) Y.set(ctx_.x(i), base_.xi[i]);
  for (const auto& [key, v] : table_) Y.set(ctx_.jet(key.first, key.second), v);
  return Y;
}

ProlongedField ProlongedField::with_coefficient(int a, const MultiIndex& J, const Expr& value) const {
  ProlongedField r = *this;
  auto it = r.table_.find({a, J});
  if (it == r.table_.end()) throw std::out_of_range("prolongation coefficient beyond the computed order");
  it->second = value;
  return r;
}

ProlongedField ProlongedField::extend(int k, Execution exec) const {
  ProlongedField r = *this;
  r.grow(k, exec);
  return r;
}

void ProlongedField::grow(int k, Execution exec) {
  if (k <= order_) return;
  const int p = ctx_.p();
  const int q = ctx_.q();
  const bool twisted = !mu_.is_zero();
  // D_i ξ^m
  std::vector<std::vector<Expr>> dxi(p, std::vector<Expr>(p));
  for (int i = 0; i < p; ++i)
    for (int m = 0; m < p; ++m) dxi[i][m] = total_derivative(base_.xi[m], i, ctx_);

  for (int n = order_ + 1; n <= k; ++n) {
    std::vector<std::pair<int, MultiIndex>> items;
    for (int a = 0; a < q; ++a)
      for (const auto& J : MultiIndex::of_order(p, n)) items.emplace_back(a, J);
    std::vector<Expr> results(items.size());
    std::exception_ptr failure;
    const ProlongTable& prev = table_;

    auto compute = [&](std::size_t idx) {
      const auto& [a, Jp] = items[idx];
      const int i = Jp.last();
      const MultiIndex J = Jp.without_last();
      std::vector<Expr> terms;
      terms.push_back(total_derivative(prev.at({a, J}), i, ctx_));
      for (int m = 0; m < p; ++m)
        if (!dxi[i][m].is_zero()) terms.push_back(-(ctx_.jet(a, J.plus(m)) * dxi[i][m]));
      if (twisted) {
        const ExprMatrix& L = mu_.Lambda[i];
        for (int b = 0; b < q; ++b) {
          const Expr& lab = L(a, b);
          if (lab.is_zero()) continue;
          terms.push_back(lab * prev.at({b, J}));
          for (int m = 0; m < p; ++m)
            if (!base_.xi[m].is_zero()) terms.push_back(-(lab * ctx_.jet(b, J.plus(m)) * base_.xi[m]));
        }
      }
      results[idx] = add(terms);
    };

    const long count = static_cast<long>(items.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::Parallel && count > 1)
    for (long idx = 0; idx < count; ++idx) {
      try {
        compute(static_cast<std::size_t>(idx));
      } catch (...) {
#pragma omp critical(twistsym_prolong_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (std::size_t idx = 0; idx < items.size(); ++idx) table_.emplace(items[idx], std::move(results[idx]));
    order_ = n;
  }
}

ProlongedField make_prolonged(const JetContext& ctx, const PointVectorField& X, ProlongKind kind, MuForm mu, int k,
                              Execution exec) {
  if (k < 0) throw std::invalid_argument("prolongation order must be non-negative");
  if (static_cast<int>(X.xi.size()) != ctx.p() || static_cast<int>(X.phi.size()) != ctx.q())
    throw std::invalid_argument("field dimensions do not match the jet context");
  check_mu(ctx, mu);
  CacheKey key = make_key(ctx, X, kind, mu);
  ProlongedField f;
  if (auto hit = cache().find(key)) {
    f = *hit;
  } else {
    f.ctx_ = ctx;
    f.base_ = X;
    f.kind_ = kind;
    f.mu_ = std::move(mu);
    f.order_ = 0;
    for (int a = 0; a < ctx.q(); ++a) f.table_.emplace(std::make_pair(a, MultiIndex{}), X.phi[a]);
  }
  if (f.order_ < k) {
    f.grow(k, exec);
    cache().store(key, f);
  }
  if (f.order_ > k) {
    for (auto it = f.table_.begin(); it != f.table_.end();) {
      if (it->first.second.order() > k)
        it = f.table_.erase(it);
      else
        ++it;
    }
    f.order_ = k;
  }
  f.ctx_ = ctx.with_order(std::max(ctx.order(), k));
  return f;
}

ProlongedField standard_prolong(const JetContext& ctx, const PointVectorField& X, int k, Execution exec) {
  return make_prolonged(ctx, X, ProlongKind::Standard, MuForm::zero(ctx), k, exec);
}

ProlongedField lambda_prolong(const JetContext& ctx, const PointVectorField& X, const Expr& lambda, int k,
                              bool allow_higher_jets, Execution exec) {
  if (ctx.p() != 1)
    throw std::invalid_argument("λ-prolongation needs one independent variable; use mu_prolong for PDEs");
  if (!allow_higher_jets && jet_order(lambda) > 1)
    throw std::invalid_argument("λ depends on jets of order > 1; enable higher-jet λ explicitly");
  return make_prolonged(ctx, X, ProlongKind::Lambda, MuForm::diagonal({lambda}, ctx.q()), k, exec);
}

ProlongedField mu_prolong(const JetContext& ctx, const PointVectorField& X, const MuForm& mu, int k, Execution exec) {
  return make_prolonged(ctx, X, ProlongKind::Mu, mu, k, exec);
}

ProlongTable difference_terms(const JetContext& ctx, const PointVectorField& X, const MuForm& mu, int k) {
  check_mu(ctx, mu);
  if (ctx.q() > 1 && k > 1) throw std::invalid_argument("vector difference terms beyond first order are unsupported");
  ProlongedField twisted = mu_prolong(ctx, X, mu, k);
  ProlongedField plain = standard_prolong(ctx, X, k);
  ProlongTable F;
  for (const auto& [key, v] : twisted.table()) F.emplace(key, v - plain.table().at(key));
  return F;
}

ProlongedField gauge_factored_prolong(const JetContext& ctx, const std::vector<Expr>& Q, const ExprMatrix& K, int k) {
  if (static_cast<int>(Q.size()) != ctx.q()) throw std::invalid_argument("characteristic needs q components");
  if (!K.square() || K.rows() != ctx.q()) throw std::invalid_argument("gauge factor must be q×q");
  if (is_zero(K.det()) == ZeroTest::Yes) throw std::domain_error("gauge factor is singular");
  ExprMatrix Kinv = K.inverse();
  ProlongedField f;
  f.ctx_ = ctx.with_order(std::max(ctx.order(), k));
  f.base_ = PointVectorField{std::vector<Expr>(ctx.p(), Expr(0)), Q, true};
  f.kind_ = ProlongKind::Mu;
  f.mu_ = pure_gauge_mu(K, ctx);
  f.order_ = k;
  // V_J = D_J (K^{-1} Q), built level by level.
  std::map<MultiIndex, ExprMatrix> V;
  V.emplace(MultiIndex{}, Kinv * ExprMatrix::column(Q));
  for (int a = 0; a < ctx.q(); ++a) f.table_.emplace(std::make_pair(a, MultiIndex{}), Q[a]);
  for (int n = 1; n <= k; ++n)
    for (const auto& J : MultiIndex::of_order(ctx.p(), n)) {
      const ExprMatrix& lower = V.at(J.without_last());
      ExprMatrix d = lower.map([&](const Expr& e) { return total_derivative(e, J.last(), ctx); });
      ExprMatrix psi = K * d;
      for (int a = 0; a < ctx.q(); ++a) f.table_.emplace(std::make_pair(a, J), psi(a, 0));
      V.emplace(J, std::move(d));
    }
  return f;
}

}  // namespace twistsym
