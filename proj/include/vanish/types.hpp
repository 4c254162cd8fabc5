#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace vanish {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;
using Index = Eigen::Index;

inline constexpr double kZeroCoeffTol = 1e-10;   // |c| at or below this counts as a structural zero
inline constexpr double kRankDeficientTol = 1e-10;  // relative Schur-complement cutoff for Gram updates

}  // namespace vanish
