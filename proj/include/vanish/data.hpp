#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vanish/types.hpp"

namespace vanish {

// Uniform/normal draws with a fixed algorithm on top of mt19937_64 so that
// seeded output is identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Standard normal via Box-Muller; one spare is cached.
  double normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Dataset {
  Matrix X;
  IntVector y;                              // class ids 0..k-1; empty when unlabeled
  std::vector<std::string> feature_names;   // column order of X
  std::vector<std::string> label_names;     // class id -> original label token

  Index rows() const { return X.rows(); }
  int features() const { return static_cast<int>(X.cols()); }
  int classes() const { return static_cast<int>(label_names.size()); }
  bool has_labels() const { return y.size() > 0; }
};

// Comma-separated file with a header row; every non-label cell must parse as
// a finite number. label_column selects the label by header name (empty for
// unlabeled data); label tokens are mapped to class ids in order of first
// appearance. Ragged rows, non-numeric cells, NaN/inf values and a missing
// label column all throw with the offending row/column in the message.
Dataset load_csv(const std::string& path, const std::string& label_column);

void save_csv(const Dataset& ds, const std::string& path);

// Seeded shuffle, then the first floor(m * train_fraction) rows become the
// train set. Label mapping is shared by both halves.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Two noisy algebraic classes in R^3, m points each, class 0 rows first.
// Class 0 satisfies x1^2 + 0.01 x2 + x3^2 - 1 = 0: x1 ~ U[-1,1], x2 ~ U[0,1]
// redrawn until 1 - x1^2 - 0.01 x2 >= 0, then x3 = +-sqrt of it. Class 1
// satisfies x1^2 + x3^2 - 1.3 = 0: theta ~ U[0,2pi), x1 = sqrt(1.3) cos,
// x3 = sqrt(1.3) sin, x2 ~ U[0,1]. Every coordinate then gets additive
// N(0, noise_std^2) noise. Deterministic for a fixed seed.
Dataset generate_synthetic(Index m_per_class, double noise_std, std::uint64_t seed);

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace vanish
