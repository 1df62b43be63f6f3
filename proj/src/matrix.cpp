#include "twistsym/matrix.hpp"

#include <map>
#include <stdexcept>

#include "expr_internal.hpp"

namespace twistsym {

ExprMatrix::ExprMatrix(int rows, int cols, std::vector<Expr> data) : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(rows * cols)) throw std::invalid_argument("matrix data size mismatch");
}

ExprMatrix ExprMatrix::identity(int n) { return scalar(n, Expr(1)); }

ExprMatrix ExprMatrix::scalar(int n, const Expr& s) {
  ExprMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = s;
  return m;
}

ExprMatrix ExprMatrix::column(std::vector<Expr> v) {
  int n = static_cast<int>(v.size());
  return ExprMatrix(n, 1, std::move(v));
}

bool ExprMatrix::is_zero() const {
  for (const auto& e : data_)
    if (!e.is_zero()) return false;
  return true;
}

namespace {
void require_same_shape(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix shape mismatch");
}
}  // namespace

ExprMatrix operator+(const ExprMatrix& a, const ExprMatrix& b) {
  require_same_shape(a, b);
  ExprMatrix m(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] + b.data_[k];
  return m;
}

ExprMatrix operator-(const ExprMatrix& a, const ExprMatrix& b) {
  require_same_shape(a, b);
  ExprMatrix m(a.rows_, a.cols_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) m.data_[k] = a.data_[k] - b.data_[k];
  return m;
}

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product shape mismatch");
  ExprMatrix m(a.rows_, b.cols_);
  for (int i = 0; i < a.rows_; ++i)
    for (int j = 0; j < b.cols_; ++j) {
      std::vector<Expr> terms;
      for (int k = 0; k < a.cols_; ++k) {
        Expr t = a(i, k) * b(k, j);
        if (!t.is_zero()) terms.push_back(t);
      }
      m(i, j) = add(terms);
    }
  return m;
}

ExprMatrix operator*(const Expr& s, const ExprMatrix& a) {
  return a.map([&](const Expr& e) { return s * e; });
}

bool operator==(const ExprMatrix& a, const ExprMatrix& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

ExprMatrix ExprMatrix::transpose() const {
  ExprMatrix m(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
  return m;
}

Expr ExprMatrix::trace() const {
  if (!square()) throw std::invalid_argument("trace of a non-square matrix");
  std::vector<Expr> d;
  for (int i = 0; i < rows_; ++i) d.push_back((*this)(i, i));
  return add(d);
}

namespace {

ExprMatrix minor_of(const ExprMatrix& m, int row, int col) {
  int n = m.rows();
  ExprMatrix r(n - 1, n - 1);
  for (int i = 0, ri = 0; i < n; ++i) {
    if (i == row) continue;
    for (int j = 0, rj = 0; j < n; ++j) {
      if (j == col) continue;
      r(ri, rj++) = m(i, j);
    }
    ++ri;
  }
  return r;
}

}  // namespace

Expr ExprMatrix::det() const {
  if (!square()) throw std::invalid_argument("determinant of a non-square matrix");
  int n = rows_;
  if (n == 0) return Expr(1);
  if (n == 1) return data_[0];
  if (n == 2) return (*this)(0, 0) * (*this)(1, 1) - (*this)(0, 1) * (*this)(1, 0);
  std::vector<Expr> terms;
  for (int j = 0; j < n; ++j) {
    if ((*this)(0, j).is_zero()) continue;
    Expr t = (*this)(0, j) * minor_of(*this, 0, j).det();
    terms.push_back(j % 2 == 0 ? t : -t);
  }
  return add(terms);
}

ExprMatrix ExprMatrix::inverse() const {
  Expr d = det();
  if (d.is_zero()) throw std::domain_error("matrix is singular");
  int n = rows_;
  if (n == 1) return ExprMatrix(1, 1, {pow(d, Rational(-1))});
  Expr inv = pow(d, Rational(-1));
  ExprMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr c = minor_of(*this, j, i).det();
      m(i, j) = ((i + j) % 2 == 0 ? c : -c) * inv;
    }
  return m;
}

std::string ExprMatrix::str() const {
  std::string s = "[";
  for (int i = 0; i < rows_; ++i) {
    if (i) s += ',';
    s += '[';
    for (int j = 0; j < cols_; ++j) {
      if (j) s += ',';
      s += (*this)(i, j).str();
    }
    s += ']';
  }
  return s + "]";
}

ExprMatrix commutator(const ExprMatrix& a, const ExprMatrix& b) { return a * b - b * a; }

// ---- rational linear algebra ----------------------------------------------------------

namespace {

/// In-place reduced row echelon form on an augmented matrix; returns pivot columns.
std::vector<std::size_t> rref(std::vector<std::vector<Rational>>& M, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < M.size(); ++c) {
    std::size_t sel = row;
    while (sel < M.size() && M[sel][c].is_zero()) ++sel;
    if (sel == M.size()) continue;
    std::swap(M[row], M[sel]);
    Rational inv = M[row][c].inverse();
    for (auto& v : M[row]) v *= inv;
    for (std::size_t r = 0; r < M.size(); ++r) {
      if (r == row || M[r][c].is_zero()) continue;
      Rational f = M[r][c];
      for (std::size_t k = c; k < M[r].size(); ++k) M[r][k] -= f * M[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

}  // namespace

std::optional<std::vector<Rational>> solve_rational(std::vector<std::vector<Rational>> A, std::vector<Rational> b) {
  std::size_t cols = A.empty() ? 0 : A[0].size();
  for (std::size_t r = 0; r < A.size(); ++r) A[r].push_back(b[r]);
  auto pivots = rref(A, cols);
  for (std::size_t r = pivots.size(); r < A.size(); ++r)
    if (!A[r][cols].is_zero()) return std::nullopt;
  std::vector<Rational> x(cols);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = A[r][cols];
  return x;
}

std::vector<std::vector<Rational>> nullspace_rational(std::vector<std::vector<Rational>> A, std::size_t cols) {
  auto pivots = rref(A, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols);
    v[f] = Rational(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -A[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

LinearRows linear_rows(const Expr& e, const std::vector<Expr>& unknowns) {
  const std::size_t n = unknowns.size();
  std::uint64_t mask = 0;
  for (const auto& u : unknowns) mask |= symbol_bit(u.symbol());
  auto unknown_index = [&](const Expr& b) -> int {
    for (std::size_t k = 0; k < n; ++k)
      if (unknowns[k] == b) return static_cast<int>(k);
    return -1;
  };
  std::map<Expr, std::vector<Rational>, ExprLess> rows;
  auto take = [&](const Expr& term, const Rational& weight) {
    Rational c = weight;
    std::vector<Factor> fs, rest;
    monomial_of(term, c, fs);
    int which = -1;
    for (auto& [b, ex] : fs) {
      int k = b.is_symbol() ? unknown_index(b) : -1;
      if (k >= 0) {
        if (which >= 0 || !ex.is_one()) throw std::invalid_argument("expression is nonlinear in the unknowns");
        which = k;
        continue;
      }
      if (ExprBuilder::node(b).symmask & mask) {
        for (const auto& u : unknowns)
          if (depends_on(b, u.symbol())) throw std::invalid_argument("unknown appears inside a nonlinear atom");
      }
      rest.emplace_back(b, ex);
    }
    Expr key = make_monomial(Rational(1), std::move(rest));
    auto& row = rows[key];
    if (row.empty()) row.resize(n + 1);
    row[which >= 0 ? static_cast<std::size_t>(which) : n] += c;
  };
  if (e.kind() == NodeKind::Sum) {
    if (!e.scalar().is_zero()) take(Expr(1), e.scalar());
    for (std::size_t i = 0; i < e.children().size(); ++i) take(e.children()[i], e.weights()[i]);
  } else if (!e.is_zero()) {
    take(e, Rational(1));
  }
  LinearRows out;
  for (auto& [k, row] : rows) {
    out.b.push_back(-row[n]);
    row.pop_back();
    out.A.push_back(std::move(row));
  }
  return out;
}

std::optional<ExprMap<Expr>> solve_identically(const std::vector<Expr>& residuals, const std::vector<Expr>& unknowns) {
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (const auto& r : residuals) {
    auto rows = linear_rows(to_fraction(r).num, unknowns);
    for (std::size_t k = 0; k < rows.A.size(); ++k) {
      A.push_back(std::move(rows.A[k]));
      b.push_back(rows.b[k]);
    }
  }
  ExprMap<Expr> out;
  if (A.empty()) {
    for (const auto& u : unknowns) out.emplace(u, Expr(0));
    return out;
  }
  auto sol = solve_rational(std::move(A), std::move(b));
  if (!sol) return std::nullopt;
  for (std::size_t k = 0; k < unknowns.size(); ++k) out.emplace(unknowns[k], Expr((*sol)[k]));
  return out;
}

}  // namespace twistsym
