#pragma once

#include <optional>
#include <string>
#include <vector>

#include "twistsym/expr.hpp"

namespace twistsym {

/// Dense matrix of canonical expressions.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols)) {}
  ExprMatrix(int rows, int cols, std::vector<Expr> data);

  static ExprMatrix identity(int n);
  static ExprMatrix scalar(int n, const Expr& s);
  static ExprMatrix column(std::vector<Expr> v);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  Expr& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  const Expr& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  const std::vector<Expr>& data() const { return data_; }

  bool is_zero() const;
  template <typename F>
  ExprMatrix map(F&& f) const {
    ExprMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] = f(data_[k]);
    return m;
  }

  friend ExprMatrix operator+(const ExprMatrix& a, const ExprMatrix& b);
  friend ExprMatrix operator-(const ExprMatrix& a, const ExprMatrix& b);
  friend ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b);
  friend ExprMatrix operator*(const Expr& s, const ExprMatrix& a);
  friend bool operator==(const ExprMatrix& a, const ExprMatrix& b);

  ExprMatrix transpose() const;
  Expr trace() const;
  Expr det() const;
  /// Inverse through the adjugate; throws std::domain_error when the
  /// determinant is structurally zero.
  ExprMatrix inverse() const;

  /// Nested-list form "[[a,b],[c,d]]".
  std::string str() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Expr> data_;
};

ExprMatrix commutator(const ExprMatrix& a, const ExprMatrix& b);

/// Row-reduced solution of A c = b over the rationals. Free variables are
/// set to zero. Returns nullopt when inconsistent.
std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> A, std::vector<Rational> b);
/// Basis of the nullspace of A (each vector has A.cols entries).
std::vector<std::vector<Rational>> nullspace_rational(std::vector<std::vector<Rational>> A, std::size_t cols);

/// Coefficients of an expression that is affine in the given unknown
/// symbols: returns, per distinct monomial in the remaining atoms, the row
/// (coefficient of each unknown, constant part). Throws std::invalid_argument
/// if some term is nonlinear in the unknowns.
struct LinearRows {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;  // right-hand side: minus the constant part
};
LinearRows linear_rows(const Expr& e, const std::vector<Expr>& unknowns);

/// Solves residual(unknowns) == 0 identically for rational values of the
/// unknowns, treating remaining atoms as independent. Uses the numerator of
/// the rational normal form.
std::optional<ExprMap<Expr>> solve_identically(const std::vector<Expr>& residuals, const std::vector<Expr>& unknowns);

}  // namespace twistsym
