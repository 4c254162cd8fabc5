#pragma once

#include "vanish/types.hpp"

namespace vanish {

// Caches B = A^T A for the growing evaluation matrix A, and optionally its
// inverse N. Appending the column b of a term that joins the order ideal
// extends B by the precomputed row/column (A^T b, ||b||^2) and, while
// `valid`, extends N by the block-inverse identities so no factorization is
// ever recomputed. Cost per append is O(l^2) on top of the O(l m) products.
class GramInverseState {
 public:
  // State over a single starting column (OAVI seeds with the all-ones column).
  static GramInverseState initial(const Vector& first_column, bool track_inverse);

  Index size() const { return l_; }
  bool valid() const { return valid_; }

  Eigen::Block<const Matrix> B() const { return bstore_.topLeftCorner(l_, l_); }
  Eigen::Block<const Matrix> N() const { return nstore_.topLeftCorner(l_, l_); }

  // Grow by one column given r = A^T b and btb = ||b||^2. B always grows.
  // N grows only while valid; a near-singular extension (relative Schur
  // complement at or below kRankDeficientTol) clears `valid` and freezes N.
  // btb must be positive.
  void append(const Vector& r, double btb);

  // Permanently stop maintaining N (L1-norm fallback hit or caller opted out).
  void invalidate() { valid_ = false; }

  // max |N B - I| over all entries; test hook for drift checks.
  double inverse_consistency_error() const;

 private:
  GramInverseState() = default;
  void grow(Index l);

  Index l_ = 0;
  bool valid_ = false;
  Matrix bstore_;
  Matrix nstore_;
};

// Convenience wrapper matching the two-matrix view of the update: appends
// using r = A^T b, btb = ||b||^2 computed here. A must have state.size() columns.
void gram_append(GramInverseState& state, const Matrix& A, const Vector& b);

// Solve B y = r for symmetric positive definite B via Cholesky. Throws on
// non-SPD input. Reference path for tests and small dense solves.
Vector solve_spd(const Matrix& B, const Vector& r);

}  // namespace vanish
