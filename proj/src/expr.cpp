#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "expr_internal.hpp"

namespace twistsym {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

const Expr& zero_expr() {
  static const Expr z{Rational(0)};
  return z;
}

const Expr& one_expr() {
  static const Expr o{Rational(1)};
  return o;
}

Expr number(const Rational& r) { return Expr(r); }

bool is_exp(const Expr& e) { return e.kind() == NodeKind::Function && e.func_kind() == FuncKind::Exp; }

}  // namespace

std::uint64_t symbol_bit(const Symbol& s) {
  std::size_t h = std::hash<std::string>{}(s.base);
  h = mix(h, s.multi.hash());
  h = mix(h, static_cast<std::size_t>(s.role));
  return std::uint64_t{1} << (h % 64);
}

// ---- node plumbing -----------------------------------------------------------

Expr ExprBuilder::finish(Node n) {
  std::size_t h = static_cast<std::size_t>(n.kind) * 0x51ed27ULL + 7;
  h = mix(h, n.scalar.hash());
  std::uint64_t mask = 0;
  int jorder = -1;
  if (n.sym) {
    h = mix(h, std::hash<std::string>{}(n.sym->base));
    h = mix(h, n.sym->multi.hash());
    h = mix(h, static_cast<std::size_t>(n.sym->role));
    mask = symbol_bit(*n.sym);
    if (n.sym->role == SymbolRole::Jet) jorder = n.sym->multi.order();
  }
  if (n.kind == NodeKind::Function) {
    h = mix(h, static_cast<std::size_t>(n.fkind));
    h = mix(h, std::hash<std::string>{}(n.fname));
    for (int t : n.tags) h = mix(h, static_cast<std::size_t>(t));
  }
  for (const auto& k : n.kids) {
    h = mix(h, k.hash());
    const Node& kn = node(k);
    mask |= kn.symmask;
    jorder = std::max(jorder, kn.jorder);
  }
  for (const auto& w : n.weights) h = mix(h, w.hash());
  n.hash = h;
  n.symmask = mask;
  n.jorder = jorder;
  return Expr(std::make_shared<const Node>(std::move(n)));
}

Expr::Expr() : Expr(Rational(0)) {}

Expr::Expr(Rational r) {
  Node n;
  n.kind = NodeKind::Number;
  n.scalar = r;
  *this = ExprBuilder::finish(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
bool Expr::is_zero() const { return node_->kind == NodeKind::Number && node_->scalar.is_zero(); }
bool Expr::is_one() const { return node_->kind == NodeKind::Number && node_->scalar.is_one(); }
const Rational& Expr::value() const { return node_->scalar; }
const Symbol& Expr::symbol() const {
  if (!node_->sym) throw std::logic_error("expression is not a symbol");
  return *node_->sym;
}
FuncKind Expr::func_kind() const { return node_->fkind; }
const std::string& Expr::func_name() const { return node_->fname; }
const std::vector<int>& Expr::func_tags() const { return node_->tags; }
const std::vector<Expr>& Expr::children() const { return node_->kids; }
const std::vector<Rational>& Expr::weights() const { return node_->weights; }
const Rational& Expr::scalar() const { return node_->scalar; }
std::size_t Expr::hash() const { return node_->hash; }

namespace {

bool equal_nodes(const Node& a, const Node& b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.kind != b.kind) return false;
  if (a.scalar != b.scalar) return false;
  switch (a.kind) {
    case NodeKind::Number:
      return true;
    case NodeKind::Sym:
      return a.sym->same(*b.sym);
    case NodeKind::Function:
      if (a.fkind != b.fkind || a.fname != b.fname || a.tags != b.tags) return false;
      break;
    default:
      break;
  }
  if (a.kids.size() != b.kids.size() || a.weights != b.weights) return false;
  for (std::size_t i = 0; i < a.kids.size(); ++i)
    if (!(a.kids[i] == b.kids[i])) return false;
  return true;
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
  return equal_nodes(ExprBuilder::node(a), ExprBuilder::node(b));
}

int compare(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return 0;
  const Node& na = ExprBuilder::node(a);
  const Node& nb = ExprBuilder::node(b);
  if (na.kind != nb.kind) return na.kind < nb.kind ? -1 : 1;
  auto cmp_str = [](const std::string& x, const std::string& y) {
    int c = x.compare(y);
    return (c > 0) - (c < 0);
  };
  auto cmp_kids = [&]() -> int {
    std::size_t n = std::min(na.kids.size(), nb.kids.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (int c = compare(na.kids[i], nb.kids[i]); c != 0) return c;
      if (i < na.weights.size() && i < nb.weights.size()) {
        if (int c = compare(na.weights[i], nb.weights[i]); c != 0) return c;
      }
    }
    if (na.kids.size() != nb.kids.size()) return na.kids.size() < nb.kids.size() ? -1 : 1;
    return 0;
  };
  switch (na.kind) {
    case NodeKind::Number:
      return compare(na.scalar, nb.scalar);
    case NodeKind::Sym: {
      const Symbol& x = *na.sym;
      const Symbol& y = *nb.sym;
      if (x.role != y.role) return x.role < y.role ? -1 : 1;
      if (int c = cmp_str(x.base, y.base); c != 0) return c;
      auto c = x.multi <=> y.multi;
      return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case NodeKind::Function: {
      if (na.fkind != nb.fkind) return na.fkind < nb.fkind ? -1 : 1;
      if (int c = cmp_str(na.fname, nb.fname); c != 0) return c;
      if (na.tags != nb.tags) return na.tags < nb.tags ? -1 : 1;
      return cmp_kids();
    }
    case NodeKind::Power:
    case NodeKind::Product:
    case NodeKind::Sum: {
      if (int c = cmp_kids(); c != 0) return c;
      return compare(na.scalar, nb.scalar);
    }
  }
  return 0;
}

// ---- monomials -----------------------------------------------------------------

Expr make_monomial(const Rational& coef, std::vector<Factor> factors) {
  if (coef.is_zero()) return zero_expr();
  if (factors.empty()) return number(coef);
  if (factors.size() == 1 && coef.is_one()) {
    if (factors[0].second.is_one()) return factors[0].first;
    Node n;
    n.kind = NodeKind::Power;
    n.scalar = Rational(1);
    n.kids = {factors[0].first};
    n.weights = {factors[0].second};
    return ExprBuilder::finish(std::move(n));
  }
  Node n;
  n.kind = NodeKind::Product;
  n.scalar = coef;
  n.kids.reserve(factors.size());
  n.weights.reserve(factors.size());
  for (auto& [b, e] : factors) {
    n.kids.push_back(std::move(b));
    n.weights.push_back(e);
  }
  return ExprBuilder::finish(std::move(n));
}

void monomial_of(const Expr& e, Rational& coef, std::vector<Factor>& factors) {
  switch (e.kind()) {
    case NodeKind::Number:
      coef *= e.value();
      break;
    case NodeKind::Power:
      factors.emplace_back(e.base(), e.exponent());
      break;
    case NodeKind::Product:
      coef *= e.scalar();
      for (std::size_t i = 0; i < e.children().size(); ++i) factors.emplace_back(e.children()[i], e.weights()[i]);
      break;
    case NodeKind::Sum:
      throw std::logic_error("monomial_of called on a sum");
    default:
      factors.emplace_back(e, Rational(1));
      break;
  }
}

std::pair<Rational, Expr> split_coefficient(const Expr& e) {
  if (e.kind() == NodeKind::Number) return {e.value(), one_expr()};
  if (e.kind() == NodeKind::Product && !e.scalar().is_one()) {
    std::vector<Factor> fs;
    Rational c(1);
    monomial_of(e, c, fs);
    return {e.scalar(), make_monomial(Rational(1), std::move(fs))};
  }
  return {Rational(1), e};
}

namespace {

Expr expand_power(const Expr& sum, std::int64_t n);
Expr distribute(const Expr& a, const Expr& b);

/// Merges a factor list into a canonical monomial. May return a non-monomial
/// when exp(log(.)) collapses or a sum reaches a positive integer power.
Expr merge_monomial(Rational coef, std::vector<Factor> fs) {
  if (coef.is_zero()) return zero_expr();
  std::sort(fs.begin(), fs.end(), [](const Factor& a, const Factor& b) { return compare(a.first, b.first) < 0; });
  std::vector<Factor> merged;
  merged.reserve(fs.size());
  for (auto& f : fs) {
    if (!merged.empty() && merged.back().first == f.first)
      merged.back().second += f.second;
    else
      merged.push_back(std::move(f));
  }
  std::vector<Factor> out;
  out.reserve(merged.size());
  std::vector<Expr> pending;
  std::vector<Expr> exp_args;
  for (auto& [b, e] : merged) {
    if (e.is_zero()) continue;
    if (b.kind() == NodeKind::Number) {
      Expr v = pow(b, e);
      if (v.kind() == NodeKind::Number) {
        coef *= v.value();
        continue;
      }
      out.emplace_back(b, e);
      continue;
    }
    if (is_exp(b)) {
      exp_args.push_back(e.is_one() ? b.children()[0] : number(e) * b.children()[0]);
      continue;
    }
    if (b.kind() == NodeKind::Sum && e.is_integer() && e.sign() > 0) {
      pending.push_back(expand_power(b, e.num()));
      continue;
    }
    out.emplace_back(b, e);
  }
  if (!exp_args.empty()) {
    Expr E = exp(add(exp_args));
    if (is_exp(E)) {
      auto pos = std::lower_bound(out.begin(), out.end(), E,
                                  [](const Factor& f, const Expr& x) { return compare(f.first, x) < 0; });
      out.insert(pos, Factor{E, Rational(1)});
    } else {
      pending.push_back(E);
    }
  }
  Expr mono = make_monomial(coef, std::move(out));
  for (const auto& p : pending) {
    Expr parts[] = {mono, p};
    mono = mul(parts);
  }
  return mono;
}

/// Terms of a canonical expression as coefficient-carrying Exprs.
void terms_of(const Expr& e, std::vector<Expr>& out) {
  if (e.kind() == NodeKind::Sum) {
    if (!e.scalar().is_zero()) out.push_back(number(e.scalar()));
    for (std::size_t i = 0; i < e.children().size(); ++i) {
      const Rational& c = e.weights()[i];
      if (c.is_one()) {
        out.push_back(e.children()[i]);
      } else {
        Rational coef = c;
        std::vector<Factor> fs;
        monomial_of(e.children()[i], coef, fs);
        out.push_back(make_monomial(coef, std::move(fs)));
      }
    }
  } else {
    out.push_back(e);
  }
}

Expr mono_times(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return zero_expr();
  if (a.kind() == NodeKind::Number && b.kind() == NodeKind::Number) return number(a.value() * b.value());
  Rational coef(1);
  std::vector<Factor> fs;
  monomial_of(a, coef, fs);
  monomial_of(b, coef, fs);
  return merge_monomial(coef, std::move(fs));
}

Expr distribute(const Expr& a, const Expr& b) {
  std::vector<Expr> ta, tb;
  terms_of(a, ta);
  terms_of(b, tb);
  std::vector<Expr> products;
  products.reserve(ta.size() * tb.size());
  for (const auto& x : ta)
    for (const auto& y : tb) products.push_back(mono_times(x, y));
  return add(products);
}

Expr expand_power(const Expr& sum, std::int64_t n) {
  Expr result = one_expr();
  Expr base = sum;
  while (n > 0) {
    if (n & 1) result = distribute(result, base);
    n >>= 1;
    if (n > 0) base = distribute(base, base);
  }
  return result;
}

Expr build_sum(const Rational& constant, std::vector<std::pair<Expr, Rational>> terms) {
  terms.erase(std::remove_if(terms.begin(), terms.end(), [](const auto& t) { return t.second.is_zero(); }),
              terms.end());
  if (terms.empty()) return number(constant);
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return compare(x.first, y.first) < 0; });
  if (terms.size() == 1 && constant.is_zero()) {
    if (terms[0].second.is_one()) return terms[0].first;
    Rational coef = terms[0].second;
    std::vector<Factor> fs;
    monomial_of(terms[0].first, coef, fs);
    return make_monomial(coef, std::move(fs));
  }
  Node n;
  n.kind = NodeKind::Sum;
  n.scalar = constant;
  n.kids.reserve(terms.size());
  n.weights.reserve(terms.size());
  for (auto& [t, c] : terms) {
    n.kids.push_back(std::move(t));
    n.weights.push_back(c);
  }
  return ExprBuilder::finish(std::move(n));
}

/// Integer q-th root of a non-negative value if exact.
bool exact_root(std::int64_t v, std::int64_t q, std::int64_t& out) {
  if (v < 0) return false;
  double guess = std::round(std::pow(static_cast<double>(v), 1.0 / static_cast<double>(q)));
  for (std::int64_t c = static_cast<std::int64_t>(guess) - 1; c <= static_cast<std::int64_t>(guess) + 1; ++c) {
    if (c < 0) continue;
    __int128 p = 1;
    bool over = false;
    for (std::int64_t i = 0; i < q; ++i) {
      p *= c;
      if (p > static_cast<__int128>(v)) {
        over = true;
        break;
      }
    }
    if (!over && p == v) {
      out = c;
      return true;
    }
  }
  return false;
}

Expr power_node(const Expr& base, const Rational& e) { return make_monomial(Rational(1), {Factor{base, e}}); }

Expr make_function(FuncKind k, std::string name, std::vector<int> tags, std::vector<Expr> args) {
  Node n;
  n.kind = NodeKind::Function;
  n.fkind = k;
  n.fname = std::move(name);
  n.tags = std::move(tags);
  n.kids = std::move(args);
  return ExprBuilder::finish(std::move(n));
}

}  // namespace

Expr make_symbol(Symbol s) {
  Node n;
  n.kind = NodeKind::Sym;
  n.sym = std::make_shared<const Symbol>(std::move(s));
  return ExprBuilder::finish(std::move(n));
}

Expr add(std::span<const Expr> terms) {
  if (terms.size() == 1) return terms[0];
  Rational constant(0);
  ExprMap<std::size_t> slot;
  std::vector<std::pair<Expr, Rational>> acc;
  auto put = [&](const Expr& key, const Rational& c) {
    auto [it, inserted] = slot.try_emplace(key, acc.size());
    if (inserted)
      acc.emplace_back(key, c);
    else
      acc[it->second].second += c;
  };
  for (const auto& t : terms) {
    switch (t.kind()) {
      case NodeKind::Number:
        constant += t.value();
        break;
      case NodeKind::Sum:
        constant += t.scalar();
        for (std::size_t i = 0; i < t.children().size(); ++i) put(t.children()[i], t.weights()[i]);
        break;
      case NodeKind::Product:
        if (!t.scalar().is_one()) {
          auto [c, rest] = split_coefficient(t);
          put(rest, c);
          break;
        }
        put(t, Rational(1));
        break;
      default:
        put(t, Rational(1));
        break;
    }
  }
  return build_sum(constant, std::move(acc));
}

Expr mul(std::span<const Expr> factors) {
  if (factors.size() == 1) return factors[0];
  Rational coef(1);
  std::vector<Factor> fs;
  std::vector<Expr> sums;
  for (const auto& f : factors) {
    switch (f.kind()) {
      case NodeKind::Number:
        if (f.value().is_zero()) return zero_expr();
        coef *= f.value();
        break;
      case NodeKind::Sum:
        sums.push_back(f);
        break;
      default:
        monomial_of(f, coef, fs);
        break;
    }
  }
  Expr result = merge_monomial(coef, std::move(fs));
  for (const auto& s : sums) result = distribute(result, s);
  return result;
}

Expr pow(const Expr& base, const Rational& r) {
  if (r.is_zero()) return one_expr();
  if (r.is_one()) return base;
  switch (base.kind()) {
    case NodeKind::Number: {
      const Rational& v = base.value();
      if (r.is_integer()) return number(v.pow(r.num()));
      if (v.is_zero()) {
        if (r.is_negative()) throw std::domain_error("zero raised to a negative power");
        return zero_expr();
      }
      if (v.is_one()) return one_expr();
      std::int64_t rn = 0, rd = 0;
      if (exact_root(v.num(), r.den(), rn) && exact_root(v.den(), r.den(), rd))
        return number(Rational(rn, rd).pow(r.num()));
      return power_node(base, r);
    }
    case NodeKind::Power: {
      const Rational& m = base.exponent();
      if (r.is_integer() || m.abs() <= Rational(1)) return pow(base.base(), m * r);
      return power_node(base, r);
    }
    case NodeKind::Product: {
      if (!r.is_integer()) return power_node(base, r);
      Rational coef = base.scalar().pow(r.num());
      std::vector<Factor> fs;
      for (std::size_t i = 0; i < base.children().size(); ++i)
        fs.emplace_back(base.children()[i], base.weights()[i] * r);
      return merge_monomial(coef, std::move(fs));
    }
    case NodeKind::Sum: {
      if (r.is_integer() && r.sign() > 0) return expand_power(base, r.num());
      if (r.is_integer()) {
        Rational lc = base.weights()[0];
        if (!lc.is_one()) {
          std::vector<std::pair<Expr, Rational>> terms;
          for (std::size_t i = 0; i < base.children().size(); ++i)
            terms.emplace_back(base.children()[i], base.weights()[i] / lc);
          Expr normalized = build_sum(base.scalar() / lc, std::move(terms));
          return make_monomial(lc.pow(r.num()), {Factor{normalized, r}});
        }
      }
      return power_node(base, r);
    }
    case NodeKind::Function:
      if (base.func_kind() == FuncKind::Exp) return exp(number(r) * base.children()[0]);
      return power_node(base, r);
    case NodeKind::Sym:
      return power_node(base, r);
  }
  return power_node(base, r);
}

Expr pow(const Expr& base, const Expr& exponent) {
  if (exponent.kind() != NodeKind::Number) throw std::invalid_argument("exponent must be a rational constant");
  return pow(base, exponent.value());
}

Expr exp(const Expr& a) {
  if (a.is_zero()) return one_expr();
  if (a.kind() == NodeKind::Function && a.func_kind() == FuncKind::Log) return a.children()[0];
  return make_function(FuncKind::Exp, "exp", {}, {a});
}

Expr log(const Expr& a) {
  if (a.is_one()) return zero_expr();
  if (is_exp(a)) return a.children()[0];
  if (a.is_number() && a.value().sign() <= 0) throw std::domain_error("log of a non-positive constant");
  return make_function(FuncKind::Log, "log", {}, {a});
}

Expr sin(const Expr& a) {
  if (a.is_zero()) return zero_expr();
  return make_function(FuncKind::Sin, "sin", {}, {a});
}

Expr cos(const Expr& a) {
  if (a.is_zero()) return one_expr();
  return make_function(FuncKind::Cos, "cos", {}, {a});
}

Expr tan(const Expr& a) {
  if (a.is_zero()) return zero_expr();
  return make_function(FuncKind::Tan, "tan", {}, {a});
}

Expr sqrt(const Expr& a) { return pow(a, Rational(1, 2)); }

Expr opaque(const std::string& name, std::vector<int> tags, std::vector<Expr> args) {
  std::sort(tags.begin(), tags.end());
  for (int t : tags)
    if (t < 1 || t > static_cast<int>(args.size())) throw std::invalid_argument("derivative tag out of range");
  return make_function(FuncKind::Opaque, name, std::move(tags), std::move(args));
}

Expr apply_function(FuncKind kind, const Expr& arg) {
  switch (kind) {
    case FuncKind::Exp:
      return exp(arg);
    case FuncKind::Log:
      return log(arg);
    case FuncKind::Sin:
      return sin(arg);
    case FuncKind::Cos:
      return cos(arg);
    case FuncKind::Tan:
      return tan(arg);
    case FuncKind::Opaque:
      break;
  }
  throw std::invalid_argument("apply_function on opaque kernel");
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  Expr t[] = {a, b};
  return add(t);
}

Expr operator-(const Expr& a) {
  Expr t[] = {number(Rational(-1)), a};
  return mul(t);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  return a + (-b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return zero_expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  Expr t[] = {a, b};
  return mul(t);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw std::domain_error("division by zero");
  return a * pow(b, Rational(-1));
}

Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

// ---- structural queries --------------------------------------------------------

namespace {

void collect_symbols(const Expr& e, std::unordered_set<Expr, ExprHash>& out, std::unordered_set<const Node*>& seen) {
  if (!seen.insert(e.id()).second) return;
  if (e.kind() == NodeKind::Sym) {
    out.insert(e);
    return;
  }
  for (const auto& k : e.children()) collect_symbols(k, out, seen);
}

}  // namespace

std::vector<Expr> free_symbols(const Expr& e) {
  std::unordered_set<Expr, ExprHash> set;
  std::unordered_set<const Node*> seen;
  collect_symbols(e, set, seen);
  std::vector<Expr> out(set.begin(), set.end());
  std::sort(out.begin(), out.end(), ExprLess{});
  return out;
}

bool depends_on(const Expr& e, const Symbol& s) {
  if ((ExprBuilder::node(e).symmask & symbol_bit(s)) == 0) return false;
  if (e.kind() == NodeKind::Sym) return e.symbol().same(s);
  for (const auto& k : e.children())
    if (depends_on(k, s)) return true;
  return false;
}

int jet_order(const Expr& e) { return ExprBuilder::node(e).jorder; }

std::size_t tree_size(const Expr& e) {
  std::size_t n = 1;
  for (const auto& k : e.children()) n += tree_size(k);
  return n;
}

// ---- calculus --------------------------------------------------------------------

namespace {

struct Deriver {
  const SymbolRule& rule;
  std::uint64_t support;
  std::unordered_map<const Node*, Expr> memo;

  Expr run(const Expr& e) {
    const Node& n = ExprBuilder::node(e);
    if ((n.symmask & support) == 0) return zero_expr();
    if (auto it = memo.find(&n); it != memo.end()) return it->second;
    Expr r = n.kind == NodeKind::Sym ? rule(*n.sym) : compute(e);
    memo.emplace(&n, r);
    return r;
  }

  Expr compute(const Expr& e) {
    switch (e.kind()) {
      case NodeKind::Number:
      case NodeKind::Sym:
        return zero_expr();
      case NodeKind::Function:
        return function(e);
      case NodeKind::Power: {
        Expr db = run(e.base());
        if (db.is_zero()) return zero_expr();
        Expr parts[] = {number(e.exponent()), pow(e.base(), e.exponent() - Rational(1)), db};
        return mul(parts);
      }
      case NodeKind::Product: {
        std::vector<Expr> terms;
        const auto& kids = e.children();
        const auto& ws = e.weights();
        for (std::size_t k = 0; k < kids.size(); ++k) {
          Expr db = run(kids[k]);
          if (db.is_zero()) continue;
          std::vector<Expr> parts;
          parts.reserve(kids.size() + 2);
          parts.push_back(number(e.scalar() * ws[k]));
          for (std::size_t j = 0; j < kids.size(); ++j) {
            Rational ex = j == k ? ws[j] - Rational(1) : ws[j];
            if (ex.is_zero()) continue;
            parts.push_back(ex.is_one() ? kids[j] : pow(kids[j], ex));
          }
          parts.push_back(db);
          terms.push_back(mul(parts));
        }
        return add(terms);
      }
      case NodeKind::Sum: {
        std::vector<Expr> terms;
        for (std::size_t k = 0; k < e.children().size(); ++k) {
          Expr d = run(e.children()[k]);
          if (d.is_zero()) continue;
          terms.push_back(e.weights()[k].is_one() ? d : number(e.weights()[k]) * d);
        }
        return add(terms);
      }
    }
    return zero_expr();
  }

  Expr function(const Expr& e) {
    const auto& args = e.children();
    if (e.func_kind() == FuncKind::Opaque) {
      std::vector<Expr> terms;
      for (std::size_t k = 0; k < args.size(); ++k) {
        Expr d = run(args[k]);
        if (d.is_zero()) continue;
        std::vector<int> tags = e.func_tags();
        tags.push_back(static_cast<int>(k) + 1);
        terms.push_back(opaque(e.func_name(), std::move(tags), args) * d);
      }
      return add(terms);
    }
    Expr da = run(args[0]);
    if (da.is_zero()) return zero_expr();
    const Expr& a = args[0];
    switch (e.func_kind()) {
      case FuncKind::Exp:
        return e * da;
      case FuncKind::Log:
        return da / a;
      case FuncKind::Sin:
        return cos(a) * da;
      case FuncKind::Cos:
        return -(sin(a) * da);
      case FuncKind::Tan:
        return (Expr(1) + e * e) * da;
      case FuncKind::Opaque:
        break;
    }
    return zero_expr();
  }
};

}  // namespace

Expr derive(const Expr& e, const SymbolRule& rule) { return derive(e, rule, ~std::uint64_t{0}); }

Expr derive(const Expr& e, const SymbolRule& rule, std::uint64_t support) {
  Deriver d{rule, support, {}};
  return d.run(e);
}

Expr diff(const Expr& e, const Symbol& s) {
  SymbolRule rule = [&](const Symbol& t) { return t.same(s) ? one_expr() : zero_expr(); };
  Deriver d{rule, symbol_bit(s), {}};
  return d.run(e);
}

Expr diff(const Expr& e, const Expr& symbol) { return diff(e, symbol.symbol()); }

namespace {

struct Substituter {
  const ExprMap<Expr>& map;
  std::uint64_t keys;
  std::unordered_map<const Node*, Expr> memo;

  Expr run(const Expr& e) {
    const Node& n = ExprBuilder::node(e);
    if ((n.symmask & keys) == 0) return e;
    if (n.kind == NodeKind::Sym) {
      auto it = map.find(e);
      return it == map.end() ? e : it->second;
    }
    if (auto it = memo.find(&n); it != memo.end()) return it->second;
    Expr r = rebuild(e);
    memo.emplace(&n, r);
    return r;
  }

  Expr rebuild(const Expr& e) {
    const auto& kids = e.children();
    switch (e.kind()) {
      case NodeKind::Function: {
        std::vector<Expr> args;
        args.reserve(kids.size());
        for (const auto& k : kids) args.push_back(run(k));
        if (e.func_kind() == FuncKind::Opaque) return opaque(e.func_name(), e.func_tags(), std::move(args));
        return apply_function(e.func_kind(), args[0]);
      }
      case NodeKind::Power:
        return pow(run(e.base()), e.exponent());
      case NodeKind::Product: {
        std::vector<Expr> parts;
        parts.reserve(kids.size() + 1);
        parts.push_back(number(e.scalar()));
        for (std::size_t i = 0; i < kids.size(); ++i) parts.push_back(pow(run(kids[i]), e.weights()[i]));
        return mul(parts);
      }
      case NodeKind::Sum: {
        std::vector<Expr> parts;
        parts.reserve(kids.size() + 1);
        parts.push_back(number(e.scalar()));
        for (std::size_t i = 0; i < kids.size(); ++i) {
          Expr t = run(kids[i]);
          parts.push_back(e.weights()[i].is_one() ? t : number(e.weights()[i]) * t);
        }
        return add(parts);
      }
      default:
        return e;
    }
  }
};

}  // namespace

Expr substitute(const Expr& e, const ExprMap<Expr>& map) {
  if (map.empty()) return e;
  std::uint64_t keys = 0;
  for (const auto& [k, v] : map) {
    if (k.kind() != NodeKind::Sym) throw std::invalid_argument("substitution key is not a symbol");
    keys |= symbol_bit(k.symbol());
  }
  Substituter s{map, keys, {}};
  return s.run(e);
}

Expr substitute(const Expr& e, const Expr& symbol, const Expr& value) {
  ExprMap<Expr> m;
  m.emplace(symbol, value);
  return substitute(e, m);
}

// ---- evaluation ----------------------------------------------------------------------

double evaluate(const Expr& e, const Valuation& v) {
  switch (e.kind()) {
    case NodeKind::Number:
      return e.value().to_double();
    case NodeKind::Sym:
      return v.symbol(e.symbol());
    case NodeKind::Function: {
      if (e.func_kind() == FuncKind::Opaque) {
        if (!v.opaque) throw std::domain_error("opaque kernel '" + e.func_name() + "' is not evaluable");
        return v.opaque(e);
      }
      double a = evaluate(e.children()[0], v);
      switch (e.func_kind()) {
        case FuncKind::Exp:
          return std::exp(a);
        case FuncKind::Log:
          return std::log(a);
        case FuncKind::Sin:
          return std::sin(a);
        case FuncKind::Cos:
          return std::cos(a);
        case FuncKind::Tan:
          return std::tan(a);
        case FuncKind::Opaque:
          break;
      }
      return 0.0;
    }
    case NodeKind::Power: {
      double b = evaluate(e.base(), v);
      const Rational& r = e.exponent();
      if (r.is_integer()) return std::pow(b, static_cast<double>(r.num()));
      return std::pow(b, r.to_double());
    }
    case NodeKind::Product: {
      double acc = e.scalar().to_double();
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        double b = evaluate(e.children()[i], v);
        const Rational& r = e.weights()[i];
        acc *= r.is_one() ? b : std::pow(b, r.to_double());
      }
      return acc;
    }
    case NodeKind::Sum: {
      double acc = e.scalar().to_double();
      for (std::size_t i = 0; i < e.children().size(); ++i)
        acc += e.weights()[i].to_double() * evaluate(e.children()[i], v);
      return acc;
    }
  }
  return 0.0;
}

}  // namespace twistsym
