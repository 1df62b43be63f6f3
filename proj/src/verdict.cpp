#include "twistsym/verdict.hpp"

namespace twistsym {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Yes:
      return "yes";
    case Outcome::No:
      return "no";
    case Outcome::Undecided:
      return "undecided";
  }
  return "undecided";
}

void Verdict::add(const std::string& label, const Expr& residual) { add(label, residual, is_zero(residual)); }

void Verdict::add(const std::string& label, const Expr& residual, ZeroTest z) {
  labels.push_back(label);
  residuals.push_back(z == ZeroTest::Yes ? Expr(0) : residual);
  tests.push_back(z);
  if (z == ZeroTest::Yes) return;
  failed.push_back(label);
  if (z == ZeroTest::No)
    outcome = Outcome::No;
  else if (outcome == Outcome::Yes)
    outcome = Outcome::Undecided;
}

void Verdict::merge(const Verdict& other) {
  for (std::size_t k = 0; k < other.labels.size(); ++k) add(other.labels[k], other.residuals[k], other.tests[k]);
}

}  // namespace twistsym
