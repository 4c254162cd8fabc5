#pragma once

#include <cstdint>
#include <vector>

#include "vanish/data.hpp"
#include "vanish/oavi.hpp"

namespace vanish {

// Per-feature min-max scaler fit on training data. Constant columns map to 0;
// apply clamps into [0,1] so out-of-range evaluation data stays feasible.
struct Scaler {
  Vector mins;
  Vector maxs;
};

Scaler fit_scaler(const Matrix& X);
Matrix apply_scaler(const Scaler& s, const Matrix& X);

// Feature map: column k of the result is |g_k(z)| with generators laid out as
// one block per class in ascending class id, construction order inside each
// block. Models must share the variable count with Z's column count.
Matrix transform_features(const std::vector<GeneratorModel>& class_models, const Matrix& Z);

// Fraction of structural zeros (|c| <= kZeroCoeffTol) among all non-leading
// coefficient slots of the given generators. Throws when there are no slots.
double sparsity(const std::vector<Polynomial>& gens);
double sparsity(const std::vector<GeneratorModel>& class_models);

// One-vs-rest linear scorer on transformed features: score_c = w_c . f + b_c.
struct LinearClassifier {
  Matrix W;       // one row per class
  Vector bias;    // one entry per class
  double radius = 1.0;  // l1 budget on each weight row; bias is unregularized
};

struct HingeFitOptions {
  double epsilon = 1e-5;
  int max_iterations = 5000;
  double bias_radius = 100.0;  // search interval for the exact bias step
};

// Squared hinge loss per class: blended pairwise FW steps on the weights over
// {||w||_1 <= radius}, with the bias re-minimized exactly after every step
// (1-d convex subproblem, searched within +-bias_radius). radius = 0 trains
// bias-only scorers. Needs at least two classes.
LinearClassifier fit_linear_classifier(const Matrix& F, const IntVector& y, int num_classes,
                                       double radius, const HingeFitOptions& opts = {});

IntVector predict_linear(const LinearClassifier& lc, const Matrix& F);

struct ClassifierModel {
  Scaler scaler;
  std::vector<GeneratorModel> class_models;  // index = class id
  LinearClassifier linear;
  std::vector<std::string> label_names;
  double psi = 0.0;
  double tau = 0.0;
  SolverId solver = SolverId::cg;
  BoostMode mode = BoostMode::ihb;
  double classifier_radius = 1.0;
};

// Full pipeline: scale, per-class generator construction (optionally across
// `threads` workers), feature transform, linear classifier. When
// class_seconds is given it receives one generator-fit wall time per class.
ClassifierModel fit_pipeline(const Dataset& train, double psi, double tau, const OaviOptions& opts,
                             double classifier_radius, int threads = 1,
                             std::vector<double>* class_seconds = nullptr);

IntVector predict(const ClassifierModel& model, const Matrix& X);
double error_rate(const IntVector& predicted, const IntVector& truth);

struct GridChoice {
  double psi = 0.0;
  double classifier_radius = 0.0;
  double cv_error = 0.0;
};

// Seeded stratified k-fold search over (psi, radius); ties keep the earliest
// grid entry. Every class needs at least `folds` members.
GridChoice cross_validate(const Dataset& train, const std::vector<double>& psis,
                          const std::vector<double>& radii, double tau, const OaviOptions& opts,
                          int folds, std::uint64_t seed, int threads = 1);

std::vector<double> default_psi_grid();
std::vector<double> default_radius_grid();

}  // namespace vanish
