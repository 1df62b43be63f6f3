#pragma once

#include <string>
#include <vector>

#include "twistsym/expr.hpp"

namespace twistsym {

enum class Outcome { Yes, No, Undecided };
const char* to_string(Outcome o);

/// Outcome of a family of "must vanish" residuals: Yes iff every residual is
/// zero, No iff some residual is provably nonzero, Undecided otherwise.
struct Verdict {
  Outcome outcome = Outcome::Yes;
  std::vector<std::string> labels;  // one per residual
  std::vector<Expr> residuals;
  std::vector<ZeroTest> tests;
  /// Labels of residuals that are not provably zero.
  std::vector<std::string> failed;

  void add(const std::string& label, const Expr& residual);
  /// Adds a residual with an already computed zero test.
  void add(const std::string& label, const Expr& residual, ZeroTest z);
  void merge(const Verdict& other);
  bool holds() const { return outcome == Outcome::Yes; }
};

}  // namespace twistsym
