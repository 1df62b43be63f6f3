#include <string>

#include "expr_internal.hpp"

namespace twistsym {

namespace {

void print(const Expr& e, std::string& out);

bool atomic_base(const Expr& b) {
  switch (b.kind()) {
    case NodeKind::Sym:
    case NodeKind::Function:
      return true;
    case NodeKind::Number:
      return b.value().is_integer() && b.value().sign() >= 0;
    default:
      return false;
  }
}

void print_factor(const Expr& b, const Rational& e, std::string& out) {
  if (atomic_base(b)) {
    print(b, out);
  } else {
    out += '(';
    print(b, out);
    out += ')';
  }
  if (e.is_one()) return;
  out += '^';
  if (e.is_integer() && e.sign() > 0) {
    out += e.str();
  } else {
    out += '(';
    out += e.str();
    out += ')';
  }
}

/// Prints coef * prod(b^e) as numerator/denominator.
void print_monomial(const Rational& coef, const std::vector<Factor>& fs, std::string& out) {
  if (coef.is_negative()) out += '-';
  std::vector<std::string> num, den;
  Rational c = coef.abs();
  for (const auto& [b, e] : fs) {
    std::string s;
    // negative powers of sums stay explicit: their bases are content-normalized
    if (e.is_negative() && b.kind() != NodeKind::Sum)
      print_factor(b, -e, s), den.push_back(std::move(s));
    else
      print_factor(b, e, s), num.push_back(std::move(s));
  }
  if (c.num() != 1 || num.empty()) num.insert(num.begin(), std::to_string(c.num()));
  if (c.den() != 1) den.insert(den.begin(), std::to_string(c.den()));
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (i) out += '*';
    out += num[i];
  }
  if (den.empty()) return;
  out += '/';
  if (den.size() > 1) out += '(';
  for (std::size_t i = 0; i < den.size(); ++i) {
    if (i) out += '*';
    out += den[i];
  }
  if (den.size() > 1) out += ')';
}

void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Number:
      out += e.value().str();
      return;
    case NodeKind::Sym:
      out += e.symbol().display;
      return;
    case NodeKind::Function: {
      out += e.func_name();
      if (e.func_kind() == FuncKind::Opaque && !e.func_tags().empty()) {
        out += "_{";
        for (int t : e.func_tags()) {
          out += ',';
          out += std::to_string(t);
        }
        out += '}';
      }
      out += '(';
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        if (i) out += ',';
        print(e.children()[i], out);
      }
      out += ')';
      return;
    }
    case NodeKind::Power:
    case NodeKind::Product: {
      Rational c(1);
      std::vector<Factor> fs;
      monomial_of(e, c, fs);
      print_monomial(c, fs, out);
      return;
    }
    case NodeKind::Sum: {
      bool first = true;
      auto emit = [&](const std::string& s) {
        if (!first && s[0] != '-') out += '+';
        out += s;
        first = false;
      };
      for (std::size_t i = 0; i < e.children().size(); ++i) {
        Rational c = e.weights()[i];
        std::vector<Factor> fs;
        monomial_of(e.children()[i], c, fs);
        std::string s;
        print_monomial(c, fs, s);
        emit(s);
      }
      if (!e.scalar().is_zero()) emit(e.scalar().str());
      return;
    }
  }
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print(*this, out);
  return out;
}

}  // namespace twistsym
