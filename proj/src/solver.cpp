#include "vanish/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vanish/solver_core.hpp"

namespace vanish {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_problem(const QuadraticProblem& p, bool needs_finite_radius) {
  if (p.B.rows() != p.B.cols() || p.B.rows() != p.r.size())
    throw std::invalid_argument("QuadraticProblem: B/r dimension mismatch");
  if (p.m < 1) throw std::invalid_argument("QuadraticProblem: m must be >= 1");
  if (!(p.radius > 0.0)) throw std::invalid_argument("QuadraticProblem: radius must be positive");
  if (needs_finite_radius && !std::isfinite(p.radius))
    throw std::invalid_argument("QuadraticProblem: this solver needs a finite radius");
}

void validate_limits(const SolverLimits& limits) {
  if (!(limits.epsilon > 0.0)) throw std::invalid_argument("SolverLimits: epsilon must be positive");
  if (limits.max_iterations < 0) throw std::invalid_argument("SolverLimits: negative iteration cap");
}

}  // namespace

double QuadraticProblem::value(const Vector& y) const {
  return (y.dot(B * y) + 2.0 * r.dot(y) + c0) / static_cast<double>(m);
}

Vector QuadraticProblem::gradient(const Vector& y) const {
  return (2.0 / static_cast<double>(m)) * (B * y + r);
}

double QuadraticProblem::line_search(const Vector& y, const Vector& d, double gmax) const {
  return exact_line_search(*this, y, d, gmax);
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::gap_reached: return "gap_reached";
    case Termination::max_iters: return "max_iters";
    case Termination::progress_stall: return "progress_stall";
    case Termination::vanishing_detected: return "vanishing_detected";
    case Termination::nonvanishing_certified: return "nonvanishing_certified";
  }
  return "unknown";
}

Vertex lmo_l1(const Vector& gradient, double radius) {
  if (gradient.size() == 0) throw std::invalid_argument("lmo_l1: empty gradient");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("lmo_l1: radius must be positive and finite");
  Index best = 0;
  double best_abs = std::abs(gradient[0]);
  for (Index i = 1; i < gradient.size(); ++i) {
    const double a = std::abs(gradient[i]);
    if (a > best_abs) {
      best = i;
      best_abs = a;
    }
  }
  const double sign = gradient[best] > 0.0 ? -1.0 : 1.0;
  Vertex v;
  v.point = Vector::Zero(gradient.size());
  v.point[best] = sign * radius;
  v.key = 2 * static_cast<std::uint64_t>(best) + (sign < 0.0 ? 1 : 0);
  return v;
}

double exact_line_search(const QuadraticProblem& p, const Vector& y, const Vector& d, double gmax) {
  if (gmax < 0.0) throw std::invalid_argument("exact_line_search: negative step bound");
  const double slope = p.gradient(y).dot(d);
  const double curvature = (2.0 / static_cast<double>(p.m)) * d.dot(p.B * d);
  if (curvature <= 0.0) return slope < 0.0 ? gmax : 0.0;
  const double gamma = -slope / curvature;
  if (gamma <= 0.0) return 0.0;
  return gamma < gmax ? gamma : gmax;
}

double certify_gap(const QuadraticProblem& p, const Vector& y) {
  validate_problem(p, /*needs_finite_radius=*/true);
  const Vector grad = p.gradient(y);
  return grad.dot(y - lmo_l1(grad, p.radius).point);
}

Vertex default_start_vertex(const QuadraticProblem& p) {
  validate_problem(p, /*needs_finite_radius=*/true);
  return lmo_l1(p.gradient(Vector::Zero(p.dim())), p.radius);
}

namespace {

// Largest eigenvalue of the PSD matrix (2/m) B: fixed-budget power iteration
// with a deterministic start, stopping early once the estimate settles.
double estimate_lipschitz(const QuadraticProblem& p) {
  const Index n = p.B.rows();
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 50; ++it) {
    Vector mv = p.B * v;
    const double norm = mv.norm();
    if (norm == 0.0) return 0.0;
    const double next = norm;
    mv /= norm;
    v.swap(mv);
    if (it > 0 && std::abs(next - lambda) <= 1e-6 * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return (2.0 / static_cast<double>(p.m)) * lambda;
}

}  // namespace

SolverResult solve_agd(const QuadraticProblem& p, const Vector& y0, const SolverLimits& limits) {
  validate_problem(p, /*needs_finite_radius=*/false);
  validate_limits(limits);
  if (y0.size() != p.dim()) throw std::invalid_argument("solve_agd: start has wrong dimension");

  SolverResult res;
  res.y = y0;
  res.objective = p.value(y0);

  // 1% headroom on the power-iteration estimate keeps the constant step safe.
  const double L = estimate_lipschitz(p) * 1.01;
  if (L <= 0.0) {
    res.fw_gap = p.gradient(y0).lpNorm<Eigen::Infinity>();
    res.termination = Termination::max_iters;
    return res;
  }

  Vector x = y0, z = y0;
  Vector best = y0;
  double f = res.objective;
  double f_best = f;
  double tk = 1.0;
  int stall_count = 0;
  long long iters = 0;

  auto finish = [&](Termination why) {
    res.y = best;
    res.objective = f_best;
    res.fw_gap = p.gradient(best).lpNorm<Eigen::Infinity>();
    res.iterations = iters;
    res.termination = why;
    return res;
  };

  while (true) {
    if (limits.trace) (*limits.trace) << iters << ',' << f << ',' << p.gradient(x).lpNorm<Eigen::Infinity>() << '\n';
    if (limits.vanishing_threshold >= 0.0 && f_best <= limits.vanishing_threshold)
      return finish(Termination::vanishing_detected);
    if (iters >= limits.max_iterations) return finish(Termination::max_iters);

    const Vector gz = p.gradient(z);
    Vector x_next = z - gz / L;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    z = x_next + ((tk - 1.0) / t_next) * (x_next - x);
    x = std::move(x_next);
    tk = t_next;
    ++iters;

    const double f_next = p.value(x);
    const double progress = f - f_next;
    f = f_next;
    if (f < f_best) {
      f_best = f;
      best = x;
    }
    if (limits.stall_threshold > 0.0) {
      if (progress < limits.stall_threshold) {
        if (++stall_count >= limits.stall_patience) return finish(Termination::progress_stall);
      } else {
        stall_count = 0;
      }
    }
  }
}

SolverResult solve_cg(const QuadraticProblem& p, const Vector& y0, const SolverLimits& limits) {
  validate_problem(p, /*needs_finite_radius=*/true);
  validate_limits(limits);
  if (y0.size() != p.dim()) throw std::invalid_argument("solve_cg: start has wrong dimension");
  if (y0.lpNorm<1>() > p.radius * (1.0 + 1e-12) + 1e-12)
    throw std::invalid_argument("solve_cg: start outside the feasible ball");

  const double radius = p.radius;
  Lmo lmo = [radius](const Vector& g) { return lmo_l1(g, radius); };
  detail::ActiveSet active;
  active.push_back({y0, detail::kStartKey, 1.0});
  return detail::fw_solve(p, lmo, detail::FwVariant::cg, y0, std::move(active), limits);
}

namespace {

SolverResult solve_pairwise(const QuadraticProblem& p, const Vertex& start,
                            const SolverLimits& limits, detail::FwVariant variant) {
  validate_problem(p, /*needs_finite_radius=*/true);
  validate_limits(limits);
  if (start.point.size() != p.dim())
    throw std::invalid_argument("pairwise solver: start vertex has wrong dimension");

  const double radius = p.radius;
  Lmo lmo = [radius](const Vector& g) { return lmo_l1(g, radius); };
  detail::ActiveSet active;
  active.push_back({start.point, start.key, 1.0});
  return detail::fw_solve(p, lmo, variant, start.point, std::move(active), limits);
}

}  // namespace

SolverResult solve_pcg(const QuadraticProblem& p, const Vertex& start, const SolverLimits& limits) {
  return solve_pairwise(p, start, limits, detail::FwVariant::pcg);
}

SolverResult solve_pcg(const QuadraticProblem& p, const SolverLimits& limits) {
  return solve_pairwise(p, default_start_vertex(p), limits, detail::FwVariant::pcg);
}

SolverResult solve_bpcg(const QuadraticProblem& p, const Vertex& start, const SolverLimits& limits) {
  return solve_pairwise(p, start, limits, detail::FwVariant::bpcg);
}

SolverResult solve_bpcg(const QuadraticProblem& p, const SolverLimits& limits) {
  return solve_pairwise(p, default_start_vertex(p), limits, detail::FwVariant::bpcg);
}

}  // namespace vanish
