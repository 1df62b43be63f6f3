#include "twistsym/jet.hpp"

#include <stdexcept>

namespace twistsym {

namespace {
constexpr int kMaxRestrictDepth = 64;
}

JetContext::JetContext(Declarations d, int order)
    : table_(std::make_shared<const SymbolTable>(std::move(d))), order_(order) {
  if (order < 0) throw std::invalid_argument("jet order must be non-negative");
}

JetContext JetContext::with_order(int k) const {
  JetContext c = *this;
  c.order_ = k;
  return c;
}

std::vector<Expr> JetContext::jets_up_to(int k) const {
  std::vector<Expr> out;
  for (int n = 0; n <= k; ++n)
    for (int a = 0; a < q(); ++a)
      for (const auto& J : MultiIndex::of_order(p(), n)) out.push_back(jet(a, J));
  return out;
}

std::vector<Expr> JetContext::coordinates(int k) const {
  std::vector<Expr> out;
  for (int i = 0; i < p(); ++i) out.push_back(x(i));
  auto j = jets_up_to(k);
  out.insert(out.end(), j.begin(), j.end());
  return out;
}

Expr total_derivative(const Expr& f, int i, const JetContext& ctx) {
  SymbolRule rule = [&](const Symbol& s) -> Expr {
    switch (s.role) {
      case SymbolRole::Independent:
        return s.index == i ? Expr(1) : Expr(0);
      case SymbolRole::Jet:
        return ctx.jet(s.index, s.multi.plus(i));
      case SymbolRole::Parameter:
        return Expr(0);
    }
    return Expr(0);
  };
  return derive(f, rule);
}

Expr total_derivative(const Expr& f, const MultiIndex& J, const JetContext& ctx) {
  Expr r = f;
  for (int i : J.indices()) r = total_derivative(r, i, ctx);
  return r;
}

SolvedSystem::SolvedSystem(JetContext ctx, std::vector<SolvedEquation> eqs)
    : ctx_(std::move(ctx)), eqs_(std::move(eqs)) {
  for (const auto& e : eqs_) {
    if (e.dep < 0 || e.dep >= ctx_.q()) throw std::invalid_argument("equation for an undeclared dependent variable");
    if (e.lead.order() < 1) throw std::invalid_argument("equation lead must be a derivative");
  }
}

int SolvedSystem::order() const {
  int k = 0;
  for (const auto& e : eqs_) k = std::max(k, e.lead.order());
  return k;
}

bool SolvedSystem::is_principal(int a, const MultiIndex& L) const {
  for (const auto& e : eqs_)
    if (e.dep == a && L.contains(e.lead)) return true;
  return false;
}

Expr SolvedSystem::residual(std::size_t k) const {
  const auto& e = eqs_.at(k);
  return ctx_.jet(e.dep, e.lead) - e.rhs;
}

Expr SolvedSystem::replacement(int a, const MultiIndex& L, int depth) const {
  if (depth > kMaxRestrictDepth) throw std::runtime_error("restriction to the equation does not terminate");
  Expr key = ctx_.jet(a, L);
  {
    std::lock_guard lock(cache_->mu);
    auto it = cache_->memo.find(key.hash());
    if (it != cache_->memo.end())
      for (const auto& [k, v] : it->second)
        if (k == key) return v;
  }
  const SolvedEquation* hit = nullptr;
  for (const auto& e : eqs_) {
    if (e.dep != a || !L.contains(e.lead)) continue;
    if (hit) throw std::invalid_argument("two equation leads apply to " + key.str());
    hit = &e;
  }
  if (!hit) throw std::logic_error("replacement requested for a parametric jet");
  Expr r;
  if (L == hit->lead) {
    r = restrict_impl(hit->rhs, depth + 1);
  } else {
    MultiIndex rest = L.minus(hit->lead);
    int i = rest.last();
    Expr lower = replacement(a, L.minus(MultiIndex({i})), depth + 1);
    r = restrict_impl(total_derivative(lower, i, ctx_), depth + 1);
  }
  std::lock_guard lock(cache_->mu);
  cache_->memo[key.hash()].emplace_back(key, r);
  return r;
}

Expr SolvedSystem::restrict_impl(const Expr& e, int depth) const {
  if (eqs_.empty()) return e;
  ExprMap<Expr> map;
  for (const auto& s : free_symbols(e)) {
    const Symbol& sym = s.symbol();
    if (sym.role != SymbolRole::Jet || !is_principal(sym.index, sym.multi)) continue;
    map.emplace(s, replacement(sym.index, sym.multi, depth + 1));
  }
  if (map.empty()) return e;
  return substitute(e, map);
}

Expr SolvedSystem::restrict(const Expr& e) const { return restrict_impl(e, 0); }

ZeroTest is_zero_on(const Expr& e, const SolvedSystem& sys) { return is_zero(sys.restrict(e)); }

}  // namespace twistsym
