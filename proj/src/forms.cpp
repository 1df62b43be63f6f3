#include "twistsym/forms.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>

#include "expr_internal.hpp"

namespace twistsym {

// ---- vector fields -----------------------------------------------------------------

void JetVectorField::set(const Expr& coordinate, const Expr& coefficient) {
  if (!coordinate.is_symbol()) throw std::invalid_argument("vector field component on a non-coordinate");
  if (coefficient.is_zero()) {
    comp_.erase(coordinate);
  } else {
    comp_[coordinate] = coefficient;
  }
  support_ = 0;
  for (const auto& [k, v] : comp_) support_ |= symbol_bit(k.symbol());
}

Expr JetVectorField::get(const Expr& coordinate) const {
  auto it = comp_.find(coordinate);
  return it == comp_.end() ? Expr(0) : it->second;
}

std::vector<std::pair<Expr, Expr>> JetVectorField::components() const {
  std::vector<std::pair<Expr, Expr>> out(comp_.begin(), comp_.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  return out;
}

Expr JetVectorField::apply(const Expr& f) const {
  if (comp_.empty()) return Expr(0);
  SymbolRule rule = [this](const Symbol& s) { return get(make_symbol(s)); };
  return derive(f, rule, support_);
}

std::string JetVectorField::str() const {
  std::string s;
  for (const auto& [k, v] : components()) {
    if (!s.empty()) s += " + ";
    s += "(" + v.str() + ")*d/d" + k.str();
  }
  return s.empty() ? "0" : s;
}

// ---- forms ---------------------------------------------------------------------------

int compare(const OneForm& a, const OneForm& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  return compare(a.coordinate, b.coordinate);
}

namespace {

int compare_basis(const DifferentialForm::Basis& a, const DifferentialForm::Basis& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = compare(a[i], b[i]); c != 0) return c;
  return 0;
}

/// Sorted concatenation with the permutation sign; 0 if a basis element repeats.
int merge_basis(const DifferentialForm::Basis& a, const DifferentialForm::Basis& b, DifferentialForm::Basis& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  int sign = 1;
  while (i < a.size() || j < b.size()) {
    if (j == b.size()) {
      out.push_back(a[i++]);
      continue;
    }
    if (i == a.size()) {
      out.push_back(b[j++]);
      continue;
    }
    int c = compare(a[i], b[j]);
    if (c == 0) return 0;
    if (c < 0) {
      out.push_back(a[i++]);
    } else {
      // b[j] moves past the remaining a.size() - i elements
      if ((a.size() - i) % 2 == 1) sign = -sign;
      out.push_back(b[j++]);
    }
  }
  return sign;
}

}  // namespace

DifferentialForm DifferentialForm::from_terms(std::vector<std::pair<Basis, Expr>> terms) {
  std::sort(terms.begin(), terms.end(), [](const auto& x, const auto& y) { return compare_basis(x.first, y.first) < 0; });
  DifferentialForm f;
  for (auto& [b, c] : terms) {
    if (!f.terms_.empty() && compare_basis(f.terms_.back().first, b) == 0) {
      f.terms_.back().second += c;
    } else {
      f.terms_.emplace_back(std::move(b), c);
    }
  }
  f.terms_.erase(std::remove_if(f.terms_.begin(), f.terms_.end(), [](const auto& t) { return t.second.is_zero(); }),
                 f.terms_.end());
  return f;
}

void DifferentialForm::accumulate(Basis b, const Expr& c) {
  if (c.is_zero()) return;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), b,
                             [](const auto& t, const Basis& x) { return compare_basis(t.first, x) < 0; });
  if (it != terms_.end() && compare_basis(it->first, b) == 0) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  } else {
    terms_.insert(it, {std::move(b), c});
  }
}

DifferentialForm DifferentialForm::function(const Expr& f) {
  DifferentialForm r;
  r.accumulate({}, f);
  return r;
}

DifferentialForm DifferentialForm::d(const Expr& coordinate) {
  if (!coordinate.is_symbol()) throw std::invalid_argument("d of a non-coordinate");
  DifferentialForm r;
  r.accumulate({OneForm{OneForm::Kind::D, coordinate}}, Expr(1));
  return r;
}

DifferentialForm DifferentialForm::contact(const JetContext& ctx, int a, const MultiIndex& J, bool expanded) {
  DifferentialForm r;
  if (!expanded) {
    r.accumulate({OneForm{OneForm::Kind::Theta, ctx.jet(a, J)}}, Expr(1));
    return r;
  }
  r.accumulate({OneForm{OneForm::Kind::D, ctx.jet(a, J)}}, Expr(1));
  for (int i = 0; i < ctx.p(); ++i) r.accumulate({OneForm{OneForm::Kind::D, ctx.x(i)}}, -ctx.jet(a, J.plus(i)));
  return r;
}

DifferentialForm DifferentialForm::horizontal(const JetContext& ctx, const std::vector<Expr>& coefficients) {
  if (static_cast<int>(coefficients.size()) != ctx.p()) throw std::invalid_argument("horizontal form needs p coefficients");
  DifferentialForm r;
  for (int i = 0; i < ctx.p(); ++i) r.accumulate({OneForm{OneForm::Kind::D, ctx.x(i)}}, coefficients[i]);
  return r;
}

int DifferentialForm::degree() const {
  int d = -1;
  for (const auto& [b, c] : terms_) d = std::max(d, static_cast<int>(b.size()));
  return d;
}

DifferentialForm DifferentialForm::component(int degree) const {
  DifferentialForm r;
  for (const auto& t : terms_)
    if (static_cast<int>(t.first.size()) == degree) r.terms_.push_back(t);
  return r;
}

Expr DifferentialForm::scalar_part() const {
  if (!terms_.empty() && terms_.front().first.empty()) return terms_.front().second;
  return Expr(0);
}

bool DifferentialForm::has_contact_basis() const {
  for (const auto& [b, c] : terms_)
    for (const auto& e : b)
      if (e.kind == OneForm::Kind::Theta) return true;
  return false;
}

namespace {

/// Replaces each basis element by a 1-form produced by `image` (or keeps it).
DifferentialForm rewrite_basis(const DifferentialForm& f,
                               const std::function<std::optional<DifferentialForm>(const OneForm&)>& image) {
  DifferentialForm out;
  for (const auto& [b, c] : f.terms()) {
    DifferentialForm acc = DifferentialForm::function(c);
    for (const auto& e : b) {
      auto img = image(e);
      DifferentialForm piece;
      if (img) {
        piece = *img;
      } else {
        piece = e.kind == OneForm::Kind::D ? DifferentialForm::d(e.coordinate) : DifferentialForm();
        if (e.kind == OneForm::Kind::Theta) throw std::logic_error("unhandled contact basis element");
      }
      acc = wedge(acc, piece);
    }
    out = out + acc;
  }
  return out;
}

}  // namespace

DifferentialForm DifferentialForm::expand_contact(const JetContext& ctx) const {
  if (!has_contact_basis()) return *this;
  return rewrite_basis(*this, [&](const OneForm& e) -> std::optional<DifferentialForm> {
    if (e.kind != OneForm::Kind::Theta) return std::nullopt;
    const Symbol& s = e.coordinate.symbol();
    return DifferentialForm::contact(ctx, s.index, s.multi, true);
  });
}

DifferentialForm DifferentialForm::contact_reduce(const JetContext& ctx) const {
  return rewrite_basis(*this, [&](const OneForm& e) -> std::optional<DifferentialForm> {
    if (e.kind == OneForm::Kind::Theta) {
      DifferentialForm t;
      t.accumulate({e}, Expr(1));
      return t;
    }
    const Symbol& s = e.coordinate.symbol();
    if (s.role != SymbolRole::Jet) return std::nullopt;
    DifferentialForm r = DifferentialForm::contact(ctx, s.index, s.multi, false);
    for (int i = 0; i < ctx.p(); ++i) r.accumulate({OneForm{OneForm::Kind::D, ctx.x(i)}}, ctx.jet(s.index, s.multi.plus(i)));
    return r;
  });
}

DifferentialForm DifferentialForm::horizontal_part() const {
  DifferentialForm r;
  for (const auto& t : terms_) {
    bool horiz = std::all_of(t.first.begin(), t.first.end(), [](const OneForm& e) {
      return e.kind == OneForm::Kind::D && e.coordinate.symbol().role == SymbolRole::Independent;
    });
    if (horiz) r.terms_.push_back(t);
  }
  return r;
}

DifferentialForm DifferentialForm::map_coefficients(const std::function<Expr(const Expr&)>& f) const {
  std::vector<std::pair<Basis, Expr>> t;
  for (const auto& [b, c] : terms_) t.emplace_back(b, f(c));
  return from_terms(std::move(t));
}

DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
  std::vector<std::pair<DifferentialForm::Basis, Expr>> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return DifferentialForm::from_terms(std::move(t));
}

DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) { return a + Expr(-1) * b; }

DifferentialForm operator*(const Expr& f, const DifferentialForm& a) {
  return a.map_coefficients([&](const Expr& c) { return f * c; });
}

bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (compare_basis(a.terms_[i].first, b.terms_[i].first) != 0 || a.terms_[i].second != b.terms_[i].second)
      return false;
  return true;
}

std::string DifferentialForm::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [b, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += "(" + c.str() + ")";
    for (std::size_t i = 0; i < b.size(); ++i) {
      s += i == 0 ? "*" : "^";
      s += b[i].kind == OneForm::Kind::D ? "d" + b[i].coordinate.str() : "theta(" + b[i].coordinate.str() + ")";
    }
  }
  return s;
}

DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  std::vector<std::pair<DifferentialForm::Basis, Expr>> t;
  DifferentialForm::Basis merged;
  for (const auto& [ba, ca] : a.terms())
    for (const auto& [bb, cb] : b.terms()) {
      int sign = merge_basis(ba, bb, merged);
      if (sign == 0) continue;
      Expr c = ca * cb;
      t.emplace_back(merged, sign > 0 ? c : -c);
    }
  return DifferentialForm::from_terms(std::move(t));
}

namespace {

DifferentialForm differential(const Expr& f) {
  std::vector<std::pair<DifferentialForm::Basis, Expr>> t;
  for (const auto& s : free_symbols(f)) {
    if (s.symbol().role == SymbolRole::Parameter) continue;
    t.push_back({{OneForm{OneForm::Kind::D, s}}, diff(f, s)});
  }
  return DifferentialForm::from_terms(std::move(t));
}

Expr evaluate_one_form(const OneForm& e, const JetVectorField& Y, const JetContext& ctx) {
  if (e.kind == OneForm::Kind::D) return Y.get(e.coordinate);
  const Symbol& s = e.coordinate.symbol();
  std::vector<Expr> t{Y.get(e.coordinate)};
  for (int i = 0; i < ctx.p(); ++i) t.push_back(-(ctx.jet(s.index, s.multi.plus(i)) * Y.get(ctx.x(i))));
  return add(t);
}

}  // namespace

DifferentialForm exterior_d(const DifferentialForm& a, const JetContext& ctx) {
  DifferentialForm e = a.expand_contact(ctx);
  DifferentialForm out;
  for (const auto& [b, c] : e.terms()) {
    std::vector<std::pair<DifferentialForm::Basis, Expr>> single{{b, Expr(1)}};
    out = out + wedge(differential(c), DifferentialForm::from_terms(std::move(single)));
  }
  return out;
}

DifferentialForm interior(const JetVectorField& Y, const DifferentialForm& a, const JetContext& ctx) {
  if (!a.scalar_part().is_zero()) throw std::invalid_argument("interior product of a 0-form");
  std::vector<std::pair<DifferentialForm::Basis, Expr>> t;
  for (const auto& [b, c] : a.terms()) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      Expr v = evaluate_one_form(b[j], Y, ctx);
      if (v.is_zero()) continue;
      DifferentialForm::Basis rest;
      for (std::size_t k = 0; k < b.size(); ++k)
        if (k != j) rest.push_back(b[k]);
      Expr coef = c * v;
      t.emplace_back(std::move(rest), j % 2 == 0 ? coef : -coef);
    }
  }
  return DifferentialForm::from_terms(std::move(t));
}

DifferentialForm lie(const JetVectorField& Y, const DifferentialForm& a, const JetContext& ctx) {
  DifferentialForm e = a.expand_contact(ctx);
  Expr f = e.scalar_part();
  DifferentialForm rest = e - DifferentialForm::function(f);
  DifferentialForm out = DifferentialForm::function(Y.apply(f));
  if (!rest.is_zero()) out = out + interior(Y, exterior_d(rest, ctx), ctx) + exterior_d(interior(Y, rest, ctx), ctx);
  return out;
}

DifferentialForm deformed_d(const DifferentialForm& beta, const DifferentialForm& mu, const JetContext& ctx) {
  return exterior_d(beta, ctx) + wedge(mu, beta);
}

DifferentialForm deformed_lie(const JetVectorField& Y, const DifferentialForm& beta, const DifferentialForm& mu,
                              const JetContext& ctx) {
  DifferentialForm b = beta.expand_contact(ctx);
  Expr f = b.scalar_part();
  DifferentialForm rest = b - DifferentialForm::function(f);
  DifferentialForm out = lie(Y, b, ctx);
  if (!rest.is_zero()) out = out + wedge(mu, interior(Y, rest, ctx));
  return out;
}

}  // namespace twistsym
