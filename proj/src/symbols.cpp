#include "twistsym/symbols.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace twistsym {

namespace {

const char* const kBuiltins[] = {"exp", "log", "sin", "cos", "tan", "sqrt"};

bool is_builtin(const std::string& s) {
  return std::find(std::begin(kBuiltins), std::end(kBuiltins), s) != std::end(kBuiltins);
}

void check_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
    throw std::invalid_argument("invalid name '" + s + "'");
  for (char c : s) {
    if (c == '_') throw std::invalid_argument("name '" + s + "' must not contain '_'");
    if (!std::isalnum(static_cast<unsigned char>(c))) throw std::invalid_argument("invalid name '" + s + "'");
  }
  if (is_builtin(s)) throw std::invalid_argument("name '" + s + "' is reserved");
}

template <typename T>
std::optional<int> find_index(const std::vector<T>& v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

}  // namespace

SymbolTable::SymbolTable(Declarations d) : decl_(std::move(d)) {
  std::set<std::string> seen;
  auto claim = [&](const std::string& n) {
    check_identifier(n);
    if (!seen.insert(n).second) throw std::invalid_argument("name '" + n + "' declared twice");
  };
  for (const auto& n : decl_.independent) claim(n);
  for (const auto& n : decl_.dependent) claim(n);
  for (const auto& n : decl_.parameters) claim(n);
  for (const auto& f : decl_.functions) {
    claim(f.name);
    if (f.arity < 1) throw std::invalid_argument("function '" + f.name + "' needs arity >= 1");
  }
  letter_jets_ = std::all_of(decl_.independent.begin(), decl_.independent.end(),
                             [](const std::string& s) { return s.size() == 1; });
}

Expr SymbolTable::independent(int i) const {
  if (i < 0 || i >= n_independent()) throw std::out_of_range("independent variable index");
  Symbol s;
  s.role = SymbolRole::Independent;
  s.base = decl_.independent[i];
  s.index = i;
  s.display = s.base;
  return make_symbol(std::move(s));
}

Expr SymbolTable::jet(int a, const MultiIndex& J) const {
  if (a < 0 || a >= n_dependent()) throw std::out_of_range("dependent variable index");
  for (int i : J.indices())
    if (i < 0 || i >= n_independent()) throw std::out_of_range("multi-index entry");
  Symbol s;
  s.role = SymbolRole::Jet;
  s.base = decl_.dependent[a];
  s.index = a;
  s.multi = J;
  s.display = s.base;
  if (!J.empty()) {
    if (letter_jets_) {
      s.display += '_';
      for (int i : J.indices()) s.display += decl_.independent[i];
    } else {
      s.display += '[';
      for (std::size_t k = 0; k < J.indices().size(); ++k) {
        if (k) s.display += ',';
        s.display += std::to_string(J.indices()[k] + 1);
      }
      s.display += ']';
    }
  }
  return make_symbol(std::move(s));
}

Expr SymbolTable::parameter(const std::string& name) const {
  if (!is_parameter(name)) throw std::invalid_argument("unknown parameter '" + name + "'");
  Symbol s;
  s.role = SymbolRole::Parameter;
  s.base = name;
  s.display = name;
  return make_symbol(std::move(s));
}

std::optional<int> SymbolTable::function_arity(const std::string& name) const {
  for (const auto& f : decl_.functions)
    if (f.name == name) return f.arity;
  return std::nullopt;
}

std::optional<int> SymbolTable::independent_index(const std::string& name) const {
  return find_index(decl_.independent, name);
}

std::optional<int> SymbolTable::dependent_index(const std::string& name) const {
  return find_index(decl_.dependent, name);
}

bool SymbolTable::is_parameter(const std::string& name) const {
  return find_index(decl_.parameters, name).has_value();
}

// ---- parser ------------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& table) : s_(text), t_(table) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(term());
      else if (accept('-'))
        terms.push_back(-term());
      else
        break;
    }
    return add(terms);
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (d.is_zero()) throw ParseError("division by zero", at);
        acc = acc / d;
      } else {
        break;
      }
    }
    return acc;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr b = primary();
    if (accept('^')) {
      skip();
      std::size_t at = pos_;
      Expr e = unary();
      if (!e.is_number()) throw ParseError("exponent must be a rational constant", at);
      try {
        return pow(b, e.value());
      } catch (const std::domain_error& err) {
        throw ParseError(err.what(), at);
      }
    }
    return b;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool digits = false;
    bool dot = false;
    try {
      while (pos_ < s_.size()) {
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
          digits = true;
          Rational r = Rational(num) * Rational(10) + Rational(c - '0');
          num = r.num();
          if (dot) den = (Rational(den) * Rational(10)).num();
          ++pos_;
        } else if (c == '.' && !dot) {
          dot = true;
          ++pos_;
        } else {
          break;
        }
      }
    } catch (const std::overflow_error&) {
      throw ParseError("numeric literal too large", start);
    }
    if (!digits) throw ParseError("malformed number", start);
    return Expr(Rational(num, den));
  }

  std::string ident() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<Expr> call_args() {
    expect('(');
    std::vector<Expr> args{expr()};
    while (accept(',')) args.push_back(expr());
    expect(')');
    return args;
  }

  Expr identifier() {
    std::size_t start = pos_;
    std::string name = ident();
    // formal partial of a kernel: f_{,1,2}(...)
    if (name.size() > 1 && name.back() == '_' && pos_ < s_.size() && s_[pos_] == '{') {
      std::string fn = name.substr(0, name.size() - 1);
      auto arity = t_.function_arity(fn);
      if (!arity) throw ParseError("unknown function '" + fn + "'", start);
      ++pos_;
      std::vector<int> tags;
      while (accept(',')) {
        skip();
        std::size_t at = pos_;
        Expr n = number();
        if (!n.value().is_integer()) throw ParseError("derivative tag must be an integer", at);
        tags.push_back(static_cast<int>(n.value().num()));
      }
      expect('}');
      return kernel(fn, *arity, std::move(tags), start);
    }
    skip();
    bool call = pos_ < s_.size() && s_[pos_] == '(';
    if (call) {
      static const std::pair<const char*, FuncKind> builtins[] = {
          {"exp", FuncKind::Exp}, {"log", FuncKind::Log}, {"sin", FuncKind::Sin},
          {"cos", FuncKind::Cos}, {"tan", FuncKind::Tan}};
      for (const auto& [n, k] : builtins) {
        if (name == n) {
          auto args = call_args();
          if (args.size() != 1) throw ParseError(name + " takes one argument", start);
          try {
            return apply_function(k, args[0]);
          } catch (const std::domain_error& e) {
            throw ParseError(e.what(), start);
          }
        }
      }
      if (name == "sqrt") {
        auto args = call_args();
        if (args.size() != 1) throw ParseError("sqrt takes one argument", start);
        return sqrt(args[0]);
      }
      if (auto arity = t_.function_arity(name)) return kernel(name, *arity, {}, start);
    }
    if (auto i = t_.independent_index(name)) return t_.independent(*i);
    if (t_.is_parameter(name)) return t_.parameter(name);
    if (auto a = t_.dependent_index(name)) {
      if (pos_ < s_.size() && s_[pos_] == '[') return indexed_jet(*a);
      return t_.dependent(*a);
    }
    auto us = name.find('_');
    if (us != std::string::npos) {
      auto a = t_.dependent_index(name.substr(0, us));
      std::string tail = name.substr(us + 1);
      if (a && !tail.empty() && t_.letter_jets()) {
        std::vector<int> idx;
        for (char c : tail) {
          auto i = t_.independent_index(std::string(1, c));
          if (!i) throw ParseError("unknown independent variable '" + std::string(1, c) + "' in jet", start);
          idx.push_back(*i);
        }
        return t_.jet(*a, MultiIndex(std::move(idx)));
      }
    }
    throw ParseError("unknown symbol '" + name + "'", start);
  }

  Expr kernel(const std::string& name, int arity, std::vector<int> tags, std::size_t start) {
    auto args = call_args();
    if (static_cast<int>(args.size()) != arity)
      throw ParseError("function '" + name + "' expects " + std::to_string(arity) + " arguments", start);
    try {
      return opaque(name, std::move(tags), std::move(args));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), start);
    }
  }

  Expr indexed_jet(int a) {
    expect('[');
    std::vector<int> idx;
    skip();
    if (!accept(']')) {
      do {
        skip();
        std::size_t at = pos_;
        Expr n = number();
        if (!n.value().is_integer() || n.value().num() < 1 || n.value().num() > t_.n_independent())
          throw ParseError("jet index out of range", at);
        idx.push_back(static_cast<int>(n.value().num()) - 1);
      } while (accept(','));
      expect(']');
    }
    return t_.jet(a, MultiIndex(std::move(idx)));
  }

  std::string_view s_;
  const SymbolTable& t_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const SymbolTable& table) { return Parser(text, table).run(); }

}  // namespace twistsym
