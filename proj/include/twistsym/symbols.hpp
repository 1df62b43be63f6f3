#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "twistsym/expr.hpp"

namespace twistsym {

struct FunctionDecl {
  std::string name;
  int arity = 1;
};

struct Declarations {
  std::vector<std::string> independent;
  std::vector<std::string> dependent;
  std::vector<std::string> parameters;
  std::vector<FunctionDecl> functions;
};

/// Name resolution for independent variables, jet coordinates, parameters
/// and opaque kernels. Jets print as u_xy when every independent name is a
/// single letter and as u[1,2] (1-based variable positions) otherwise.
class SymbolTable {
 public:
  SymbolTable() = default;
  /// Validates the declarations: identifiers without '_', no duplicates,
  /// no clash with built-in function names.
  explicit SymbolTable(Declarations d);

  const Declarations& declarations() const { return decl_; }
  int n_independent() const { return static_cast<int>(decl_.independent.size()); }
  int n_dependent() const { return static_cast<int>(decl_.dependent.size()); }
  bool letter_jets() const { return letter_jets_; }

  Expr independent(int i) const;
  Expr dependent(int a) const { return jet(a, MultiIndex{}); }
  Expr jet(int a, const MultiIndex& J) const;
  Expr parameter(const std::string& name) const;
  std::optional<int> function_arity(const std::string& name) const;

  std::optional<int> independent_index(const std::string& name) const;
  std::optional<int> dependent_index(const std::string& name) const;
  bool is_parameter(const std::string& name) const;

 private:
  Declarations decl_;
  bool letter_jets_ = true;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Parses infix text: + - * / ^, parentheses, decimal and rational literals,
/// exp log sin cos tan sqrt, declared kernels f(x,u) and their formal
/// partials f_{,1,2}(x,u), jets u_xy or u[1,2].
Expr parse(std::string_view text, const SymbolTable& table);

}  // namespace twistsym
