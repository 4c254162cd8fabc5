#include "vanish/gram.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vanish {

GramInverseState GramInverseState::initial(const Vector& first_column, bool track_inverse) {
  const double btb = first_column.squaredNorm();
  if (!(btb > 0.0)) throw std::invalid_argument("GramInverseState: first column must be nonzero");
  GramInverseState s;
  s.bstore_.resize(8, 8);
  s.nstore_.resize(8, 8);
  s.l_ = 1;
  s.bstore_(0, 0) = btb;
  s.valid_ = track_inverse;
  if (track_inverse) s.nstore_(0, 0) = 1.0 / btb;
  return s;
}

void GramInverseState::grow(Index l) {
  if (l <= bstore_.cols()) return;
  Index cap = bstore_.cols();
  while (cap < l) cap *= 2;
  Matrix b2(cap, cap), n2(cap, cap);
  b2.topLeftCorner(l_, l_) = bstore_.topLeftCorner(l_, l_);
  n2.topLeftCorner(l_, l_) = nstore_.topLeftCorner(l_, l_);
  bstore_.swap(b2);
  nstore_.swap(n2);
}

void GramInverseState::append(const Vector& r, double btb) {
  if (r.size() != l_) throw std::invalid_argument("GramInverseState::append: r has wrong length");
  if (!(btb > 0.0)) throw std::invalid_argument("GramInverseState::append: ||b||^2 must be positive");
  grow(l_ + 1);

  if (valid_) {
    const auto N = nstore_.topLeftCorner(l_, l_);
    const Vector Nr = N.selfadjointView<Eigen::Lower>() * r;
    const double schur = btb - r.dot(Nr);
    if (std::abs(schur) <= kRankDeficientTol * btb) {
      valid_ = false;  // rank-deficient extension; N frozen, B still grows below
    } else {
      // Block-inverse extension: n2 = -(N + N r r^T N / schur) r / btb,
      // n3 = (1 - r^T n2) / btb, N1 = N - (N r) n2^T.
      const Vector n2 = -(Nr + Nr * (r.dot(Nr) / schur)) / btb;
      const double n3 = (1.0 - r.dot(n2)) / btb;
      nstore_.topLeftCorner(l_, l_) -= Nr * n2.transpose();
      nstore_.col(l_).head(l_) = n2;
      nstore_.row(l_).head(l_) = n2.transpose();
      nstore_(l_, l_) = n3;
    }
  }

  bstore_.col(l_).head(l_) = r;
  bstore_.row(l_).head(l_) = r.transpose();
  bstore_(l_, l_) = btb;
  ++l_;
}

double GramInverseState::inverse_consistency_error() const {
  if (!valid_) return std::numeric_limits<double>::quiet_NaN();
  const Matrix nb = N() * B();
  return (nb - Matrix::Identity(l_, l_)).cwiseAbs().maxCoeff();
}

void gram_append(GramInverseState& state, const Matrix& A, const Vector& b) {
  if (A.cols() != state.size()) throw std::invalid_argument("gram_append: A has wrong column count");
  if (A.rows() != b.size()) throw std::invalid_argument("gram_append: b has wrong length");
  state.append(A.transpose() * b, b.squaredNorm());
}

Vector solve_spd(const Matrix& B, const Vector& r) {
  if (B.rows() != B.cols() || B.rows() != r.size())
    throw std::invalid_argument("solve_spd: dimension mismatch");
  Eigen::LLT<Matrix> llt(B);
  if (llt.info() != Eigen::Success) throw std::runtime_error("solve_spd: matrix is not positive definite");
  return llt.solve(r);
}

}  // namespace vanish
