#pragma once

#include <vector>

#include "vanish/term.hpp"
#include "vanish/types.hpp"

namespace vanish {

// Column store for term evaluations over a fixed sample set. Column j holds
// terms()[j] evaluated at every sample; columns are appended in deglex order
// as the order ideal grows. Capacity doubles so appends stay O(m) amortized.
class EvalMatrix {
 public:
  explicit EvalMatrix(Index m);

  Index rows() const { return m_; }
  Index cols() const { return ncols_; }
  const TermList& terms() const { return terms_; }

  void append(const Term& t, const Vector& column);

  // View of the live columns; invalidated by append.
  Eigen::Block<const Matrix> matrix() const { return storage_.topLeftCorner(m_, ncols_); }
  Matrix::ConstColXpr col(Index j) const { return storage_.col(j); }

 private:
  Index m_ = 0;
  Index ncols_ = 0;
  Matrix storage_;
  TermList terms_;
};

// Evaluate term u at every row of X directly (product of coordinate powers).
Vector eval_term_direct(const Term& u, const Matrix& X);

// Evaluate u over the samples behind A, reusing a cached column: if some
// maximal divisor u/x_i already has a column, the result is that column
// times X.col(i). Falls back to direct evaluation when no divisor is cached.
Vector eval_term_column(const Term& u, const EvalMatrix& A, const Matrix& X);

// Mean squared entry of an evaluation vector: (1/m) * ||v||^2.
double mse(const Vector& v);

// A polynomial in border form: one leading term with unit coefficient plus a
// coefficient vector over a snapshot of the order ideal.
struct Polynomial {
  Term leading;
  TermList basis;   // deglex-sorted order-ideal snapshot the coefficients refer to
  Vector coeffs;    // same length as basis

  int degree() const { return leading.degree(); }
  double l1_norm() const { return 1.0 + coeffs.lpNorm<1>(); }
};

// Evaluate g over the rows of Z: g(Z) = sum_j coeffs[j] * basis[j](Z) + leading(Z).
Vector eval_polynomial(const Polynomial& g, const Matrix& Z);

// Shared-cache evaluation of many polynomials over one sample set. Builds
// columns for every term in O once (divisor products, cheapest first), then
// one extra column per leading term. O must be deglex-sorted, closed under
// division, and contain every basis term used by the polynomials.
Matrix eval_polynomials(const std::vector<Polynomial>& gens, const TermList& O, const Matrix& Z);

}  // namespace vanish
