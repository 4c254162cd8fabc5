#include "vanish/eval.hpp"

#include <stdexcept>

namespace vanish {

EvalMatrix::EvalMatrix(Index m) : m_(m) {
  if (m < 1) throw std::invalid_argument("EvalMatrix: need at least one sample");
  storage_.resize(m_, 8);
}

void EvalMatrix::append(const Term& t, const Vector& column) {
  if (column.size() != m_) throw std::invalid_argument("EvalMatrix::append: column length mismatch");
  if (ncols_ == storage_.cols()) {
    Matrix grown(m_, storage_.cols() * 2);
    grown.leftCols(ncols_) = storage_.leftCols(ncols_);
    storage_.swap(grown);
  }
  storage_.col(ncols_) = column;
  terms_.push_back(t);
  ++ncols_;
}

Vector eval_term_direct(const Term& u, const Matrix& X) {
  if (u.nvars() != X.cols()) throw std::invalid_argument("eval_term_direct: variable count mismatch");
  Vector v = Vector::Ones(X.rows());
  for (int i = 0; i < u.nvars(); ++i)
    for (int e = 0; e < u.exponent(i); ++e) v.array() *= X.col(i).array();
  return v;
}

Vector eval_term_column(const Term& u, const EvalMatrix& A, const Matrix& X) {
  if (X.rows() != A.rows()) throw std::invalid_argument("eval_term_column: sample count mismatch");
  for (int i = 0; i < u.nvars(); ++i) {
    if (u.exponent(i) == 0) continue;
    const Index j = find_term(A.terms(), u.divided_by_variable(i));
    if (j >= 0) return A.col(j).cwiseProduct(X.col(i));
  }
  return eval_term_direct(u, X);
}

double mse(const Vector& v) {
  if (v.size() == 0) throw std::invalid_argument("mse: empty vector");
  return v.squaredNorm() / static_cast<double>(v.size());
}

Vector eval_polynomial(const Polynomial& g, const Matrix& Z) {
  if (g.coeffs.size() != static_cast<Index>(g.basis.size()))
    throw std::invalid_argument("eval_polynomial: coefficient/basis length mismatch");
  Vector v = eval_term_direct(g.leading, Z);
  for (std::size_t j = 0; j < g.basis.size(); ++j) {
    if (g.coeffs[static_cast<Index>(j)] == 0.0) continue;
    v += g.coeffs[static_cast<Index>(j)] * eval_term_direct(g.basis[j], Z);
  }
  return v;
}

Matrix eval_polynomials(const std::vector<Polynomial>& gens, const TermList& O, const Matrix& Z) {
  const Index m = Z.rows();
  EvalMatrix cache(m);
  for (const Term& t : O) cache.append(t, eval_term_column(t, cache, Z));

  Matrix out(m, static_cast<Index>(gens.size()));
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const Polynomial& g = gens[k];
    Vector v = eval_term_column(g.leading, cache, Z);
    for (std::size_t j = 0; j < g.basis.size(); ++j) {
      const double c = g.coeffs[static_cast<Index>(j)];
      if (c == 0.0) continue;
      const Index pos = find_term(O, g.basis[j]);
      if (pos < 0) throw std::invalid_argument("eval_polynomials: basis term missing from O");
      v += c * cache.col(pos);
    }
    out.col(static_cast<Index>(k)) = v;
  }
  return out;
}

}  // namespace vanish
