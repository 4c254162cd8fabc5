#include "vanish/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "vanish/solver_core.hpp"

namespace vanish {

Scaler fit_scaler(const Matrix& X) {
  if (X.rows() < 1) throw std::invalid_argument("fit_scaler: empty data");
  return Scaler{X.colwise().minCoeff(), X.colwise().maxCoeff()};
}

Matrix apply_scaler(const Scaler& s, const Matrix& X) {
  if (X.cols() != s.mins.size()) throw std::invalid_argument("apply_scaler: column count mismatch");
  Matrix out(X.rows(), X.cols());
  for (Index j = 0; j < X.cols(); ++j) {
    const double lo = s.mins[j];
    const double range = s.maxs[j] - lo;
    if (range > 0.0) {
      out.col(j) = ((X.col(j).array() - lo) / range).cwiseMax(0.0).cwiseMin(1.0);
    } else {
      out.col(j).setZero();  // constant training column carries no information
    }
  }
  return out;
}

Matrix transform_features(const std::vector<GeneratorModel>& class_models, const Matrix& Z) {
  Index total = 0;
  for (const GeneratorModel& m : class_models) {
    if (m.n != Z.cols()) throw std::invalid_argument("transform_features: variable count mismatch");
    total += static_cast<Index>(m.generators.size());
  }
  Matrix F(Z.rows(), total);
  Index at = 0;
  for (const GeneratorModel& m : class_models) {
    const Index width = static_cast<Index>(m.generators.size());
    if (width == 0) continue;
    F.middleCols(at, width) = eval_polynomials(m.generators, m.O, Z).cwiseAbs();
    at += width;
  }
  return F;
}

double sparsity(const std::vector<Polynomial>& gens) {
  long long zeros = 0, slots = 0;
  for (const Polynomial& g : gens) {
    slots += g.coeffs.size();
    zeros += (g.coeffs.array().abs() <= kZeroCoeffTol).count();
  }
  if (slots == 0) throw std::domain_error("sparsity: no coefficient slots");
  return static_cast<double>(zeros) / static_cast<double>(slots);
}

double sparsity(const std::vector<GeneratorModel>& class_models) {
  std::vector<Polynomial> all;
  for (const GeneratorModel& m : class_models)
    all.insert(all.end(), m.generators.begin(), m.generators.end());
  return sparsity(all);
}

namespace {

// One-class squared hinge state at fixed signs s (+-1 per row):
//   L(w, b) = (1/q) sum_i max(0, 1 - s_i (f_i . w + b))^2.
// The weight block moves by blended pairwise FW steps over the l1 ball; the
// bias is re-minimized exactly after every step. Folding the bias into the
// vertex set instead would couple its magnitude to the step size and make
// the iteration crawl whenever the optimal bias is far from +-bias_bound.
struct HingeState {
  const Matrix& F;  // q x p
  Vector s;

  double q() const { return static_cast<double>(F.rows()); }

  // margins at (w, b), i.e. 1 - s .* (F w + b)
  Vector margins(const Vector& w, double b) const {
    return Vector::Ones(F.rows()) - s.cwiseProduct(Vector((F * w).array() + b));
  }

  double value(const Vector& w, double b) const {
    return margins(w, b).cwiseMax(0.0).squaredNorm() / q();
  }

  Vector weight_gradient(const Vector& w, double b) const {
    const Vector active = margins(w, b).cwiseMax(0.0);
    return F.transpose() * (active.cwiseProduct(s) * (-2.0 / q()));
  }

  // The loss is piecewise quadratic and convex along any segment, so its
  // directional derivative is nondecreasing; bisection pins the minimizer.
  double line_search(const Vector& w, double b, const Vector& d, double gmax) const {
    const Vector base = margins(w, b);
    const Vector slope = -s.cwiseProduct(Vector(F * d));
    auto deriv = [&](double gamma) {
      return 2.0 / q() * (base + gamma * slope).cwiseMax(0.0).dot(slope);
    };
    if (deriv(0.0) >= 0.0) return 0.0;
    if (deriv(gmax) <= 0.0) return gmax;
    double lo = 0.0, hi = gmax;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  // Exact minimizer over the bias alone, searched within [-bound, bound].
  double best_bias(const Vector& w, double bound) const {
    const Vector base = Vector::Ones(F.rows()) - s.cwiseProduct(Vector(F * w));
    auto deriv = [&](double b) {
      return -2.0 / q() * (base - b * s).cwiseMax(0.0).dot(s);
    };
    if (deriv(-bound) >= 0.0) return -bound;
    if (deriv(bound) <= 0.0) return bound;
    double lo = -bound, hi = bound;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (deriv(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
};

}  // namespace

LinearClassifier fit_linear_classifier(const Matrix& F, const IntVector& y, int num_classes,
                                       double radius, const HingeFitOptions& opts) {
  if (F.rows() != y.size()) throw std::invalid_argument("fit_linear_classifier: row count mismatch");
  if (F.rows() < 1) throw std::invalid_argument("fit_linear_classifier: empty data");
  if (num_classes < 2) throw std::invalid_argument("fit_linear_classifier: need at least two classes");
  if (radius < 0.0) throw std::invalid_argument("fit_linear_classifier: negative radius");
  if ((y.array() < 0).any() || (y.array() >= num_classes).any())
    throw std::invalid_argument("fit_linear_classifier: label out of range");

  const Index p = F.cols();
  LinearClassifier lc;
  lc.W.resize(num_classes, p);
  lc.bias.resize(num_classes);
  lc.radius = radius;

  for (int c = 0; c < num_classes; ++c) {
    const HingeState obj{F, (2 * (y.array() == c).cast<double>() - 1.0).matrix()};
    Vector w = Vector::Zero(p);
    double bias = obj.best_bias(w, opts.bias_radius);
    if (p == 0 || radius == 0.0) {
      lc.W.row(c).setZero();
      lc.bias[c] = bias;
      continue;
    }

    const Vertex start = lmo_l1(obj.weight_gradient(w, bias), radius);
    w = start.point;
    bias = obj.best_bias(w, opts.bias_radius);
    detail::ActiveSet active;
    active.push_back({start.point, start.key, 1.0});

    for (int it = 0; it < opts.max_iterations; ++it) {
      const Vector grad = obj.weight_gradient(w, bias);
      const Vertex v = lmo_l1(grad, radius);
      // bias is block-optimal here, so the weight gap certifies the pair
      if (grad.dot(w - v.point) <= opts.epsilon) break;

      const std::size_t away_idx = detail::select_active(active, grad, +1);
      const std::size_t local_idx = detail::select_active(active, grad, -1);
      const double local_score =
          grad.dot(active[local_idx].point) - grad.dot(active[away_idx].point);
      if (grad.dot(v.point - w) >= local_score) {
        const Vertex target{active[local_idx].point, active[local_idx].key};
        const double gmax = active[away_idx].weight;
        const Vector d = target.point - active[away_idx].point;
        const double gamma = obj.line_search(w, bias, d, gmax);
        w += gamma * d;
        detail::add_vertex_weight(active, target, gamma);
        if (gamma >= gmax) {
          active.erase(active.begin() + static_cast<std::ptrdiff_t>(away_idx));
        } else {
          active[away_idx].weight -= gamma;
        }
      } else {
        const Vector d = v.point - w;
        const double gamma = obj.line_search(w, bias, d, 1.0);
        w += gamma * d;
        for (detail::ActiveVertex& a : active) a.weight *= (1.0 - gamma);
        detail::add_vertex_weight(active, v, gamma);
        if (gamma >= 1.0) {
          detail::ActiveSet keep;
          for (detail::ActiveVertex& a : active)
            if (a.key == v.key) keep.push_back(std::move(a));
          active.swap(keep);
        }
      }
      bias = obj.best_bias(w, opts.bias_radius);
    }

    lc.W.row(c) = w.transpose();
    lc.bias[c] = bias;
  }
  return lc;
}

IntVector predict_linear(const LinearClassifier& lc, const Matrix& F) {
  if (F.cols() != lc.W.cols()) throw std::invalid_argument("predict_linear: feature count mismatch");
  const Matrix scores = (F * lc.W.transpose()).rowwise() + lc.bias.transpose();
  IntVector out(F.rows());
  for (Index i = 0; i < F.rows(); ++i) {
    Index best = 0;
    for (Index c = 1; c < scores.cols(); ++c)
      if (scores(i, c) > scores(i, best)) best = c;  // ties keep the lowest class id
    out[i] = static_cast<int>(best);
  }
  return out;
}

ClassifierModel fit_pipeline(const Dataset& train, double psi, double tau, const OaviOptions& opts,
                             double classifier_radius, int threads,
                             std::vector<double>* class_seconds) {
  if (!train.has_labels()) throw std::invalid_argument("fit_pipeline: training data has no labels");
  const int k = train.classes();
  if (k < 2) throw std::invalid_argument("fit_pipeline: need at least two classes");

  ClassifierModel model;
  model.scaler = fit_scaler(train.X);
  model.label_names = train.label_names;
  model.psi = psi;
  model.tau = tau;
  model.solver = opts.solver;
  model.mode = opts.mode;
  model.classifier_radius = classifier_radius;

  const Matrix Xs = apply_scaler(model.scaler, train.X);
  std::vector<Matrix> class_rows(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    const Index count = (train.y.array() == c).count();
    if (count == 0) throw std::invalid_argument("fit_pipeline: class without training rows");
    Matrix sub(count, Xs.cols());
    Index at = 0;
    for (Index i = 0; i < Xs.rows(); ++i)
      if (train.y[i] == c) sub.row(at++) = Xs.row(i);
    class_rows[static_cast<std::size_t>(c)] = std::move(sub);
  }

  model.class_models.resize(static_cast<std::size_t>(k));
  if (class_seconds) class_seconds->assign(static_cast<std::size_t>(k), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(k));

  auto fit_class = [&](int c) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      model.class_models[static_cast<std::size_t>(c)] =
          oavi_fit(class_rows[static_cast<std::size_t>(c)], psi, tau, opts);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (class_seconds) (*class_seconds)[static_cast<std::size_t>(c)] = dt.count();
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };

  const int workers = std::max(1, std::min(threads, k));
  if (workers == 1) {
    for (int c = 0; c < k; ++c) fit_class(c);
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (int c = next.fetch_add(1); c < k; c = next.fetch_add(1)) fit_class(c);
      });
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);

  const Matrix F = transform_features(model.class_models, Xs);
  model.linear = fit_linear_classifier(F, train.y, k, classifier_radius);
  return model;
}

IntVector predict(const ClassifierModel& model, const Matrix& X) {
  const Matrix Xs = apply_scaler(model.scaler, X);
  return predict_linear(model.linear, transform_features(model.class_models, Xs));
}

double error_rate(const IntVector& predicted, const IntVector& truth) {
  if (predicted.size() != truth.size() || predicted.size() == 0)
    throw std::invalid_argument("error_rate: size mismatch");
  return static_cast<double>((predicted.array() != truth.array()).count()) /
         static_cast<double>(predicted.size());
}

std::vector<double> default_psi_grid() { return {0.1, 0.05, 0.01, 0.005, 0.001, 0.0005, 0.0001}; }
std::vector<double> default_radius_grid() { return {0.1, 1.0, 10.0}; }

namespace {

Dataset take_rows(const Dataset& ds, const std::vector<Index>& rows) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.label_names = ds.label_names;
  out.X.resize(static_cast<Index>(rows.size()), ds.X.cols());
  out.y.resize(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.X.row(static_cast<Index>(i)) = ds.X.row(rows[i]);
    out.y[static_cast<Index>(i)] = ds.y[rows[i]];
  }
  return out;
}

}  // namespace

GridChoice cross_validate(const Dataset& train, const std::vector<double>& psis,
                          const std::vector<double>& radii, double tau, const OaviOptions& opts,
                          int folds, std::uint64_t seed, int threads) {
  if (!train.has_labels()) throw std::invalid_argument("cross_validate: unlabeled data");
  if (folds < 2) throw std::invalid_argument("cross_validate: need at least two folds");
  if (psis.empty() || radii.empty()) throw std::invalid_argument("cross_validate: empty grid");
  const int k = train.classes();
  if (k < 2) throw std::invalid_argument("cross_validate: need at least two classes");

  // Stratified fold ids: shuffle within each class, then deal round-robin so
  // every training complement keeps all classes.
  std::vector<int> fold_of(static_cast<std::size_t>(train.rows()));
  Rng rng(seed);
  for (int c = 0; c < k; ++c) {
    std::vector<Index> idx;
    for (Index i = 0; i < train.rows(); ++i)
      if (train.y[i] == c) idx.push_back(i);
    if (static_cast<int>(idx.size()) < folds)
      throw std::invalid_argument("cross_validate: class smaller than fold count");
    for (std::size_t i = idx.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng.below(i));
      std::swap(idx[i - 1], idx[j]);
    }
    for (std::size_t i = 0; i < idx.size(); ++i)
      fold_of[static_cast<std::size_t>(idx[i])] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  GridChoice best;
  bool have_best = false;
  for (const double psi : psis) {
    for (const double radius : radii) {
      long long wrong = 0, total = 0;
      for (int f = 0; f < folds; ++f) {
        std::vector<Index> tr, te;
        for (Index i = 0; i < train.rows(); ++i)
          (fold_of[static_cast<std::size_t>(i)] == f ? te : tr).push_back(i);
        const Dataset dtr = take_rows(train, tr);
        const Dataset dte = take_rows(train, te);
        const ClassifierModel m = fit_pipeline(dtr, psi, tau, opts, radius, threads);
        const IntVector pred = predict(m, dte.X);
        wrong += (pred.array() != dte.y.array()).count();
        total += dte.rows();
      }
      const double err = static_cast<double>(wrong) / static_cast<double>(total);
      if (!have_best || err < best.cv_error) {
        best = {psi, radius, err};
        have_best = true;
      }
    }
  }
  return best;
}

}  // namespace vanish
