#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vanish/data.hpp"
#include "vanish/gram.hpp"
#include "vanish/solver.hpp"

using namespace vanish;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gram form of (1/m)||A y + b||^2; f* = 0 exactly at y = target when
// b = -A * target.
QuadraticProblem problem_with_minimizer(Rng& rng, Index m, Index dim, const Vector& target,
                                        double radius) {
  Matrix A(m, dim);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < dim; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
  QuadraticProblem p;
  p.B = A.transpose() * A;
  p.r = -p.B * target;
  p.c0 = target.dot(p.B * target);
  p.m = m;
  p.radius = radius;
  return p;
}

QuadraticProblem one_dim(double center, double radius) {
  QuadraticProblem p;
  p.B = Matrix::Identity(1, 1);
  p.r = Vector::Constant(1, -center);
  p.c0 = center * center;
  p.m = 1;
  p.radius = radius;
  return p;
}

Vector decode_key(std::uint64_t key, Index dim, double radius) {
  Vector v = Vector::Zero(dim);
  const auto i = static_cast<Index>(key >> 1);
  v[i] = (key & 1) ? -radius : radius;
  return v;
}

}  // namespace

TEST_CASE("l1 lmo picks the largest gradient entry with opposing sign") {
  Vector g(2);
  g << 3.0, -5.0;
  const Vertex v = lmo_l1(g, 2.0);
  CHECK(v.point[0] == 0.0);
  CHECK(v.point[1] == 2.0);
  CHECK(v.key == 2);
  CHECK(g.dot(v.point) == doctest::Approx(-10.0));

  Vector g2(3);
  g2 << -1.0, 0.0, 0.0;
  const Vertex v2 = lmo_l1(g2, 1.0);
  CHECK(v2.point[0] == 1.0);
  CHECK(v2.key == 0);
}

TEST_CASE("l1 lmo ties go to the lowest index and zero gradients go positive") {
  Vector g(2);
  g << 2.0, -2.0;
  const Vertex v = lmo_l1(g, 1.0);
  CHECK(v.point[0] == -1.0);  // index 0 wins the tie
  CHECK(v.point[1] == 0.0);
  CHECK(v.key == 1);

  const Vertex z = lmo_l1(Vector::Zero(3), 1.5);
  CHECK(z.point[0] == 1.5);
  CHECK(z.key == 0);
}

TEST_CASE("quadratic problem matches its residual form") {
  Rng rng(31);
  const Index m = 17, dim = 4;
  Matrix A(m, dim);
  Vector b(m);
  for (Index i = 0; i < m; ++i) {
    b[i] = rng.uniform(-1.0, 1.0);
    for (Index j = 0; j < dim; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
  }
  QuadraticProblem p{A.transpose() * A, A.transpose() * b, b.squaredNorm(), m, 1.0};
  Vector y(dim);
  for (Index j = 0; j < dim; ++j) y[j] = rng.uniform(-0.3, 0.3);
  CHECK(p.value(y) == doctest::Approx((A * y + b).squaredNorm() / static_cast<double>(m)));
  const Vector grad = p.gradient(y);
  const Vector want = 2.0 / static_cast<double>(m) * (p.B * y + p.r);
  CHECK((grad - want).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("exact line search lands on the parabola vertex and clamps") {
  const QuadraticProblem p = one_dim(1.0, 10.0);
  const Vector y = Vector::Zero(1);
  const Vector d = Vector::Ones(1);
  CHECK(exact_line_search(p, y, d, 10.0) == doctest::Approx(1.0));
  CHECK(exact_line_search(p, y, d, 0.5) == doctest::Approx(0.5));
  CHECK(exact_line_search(p, y, -d, 10.0) == 0.0);  // ascent direction

  QuadraticProblem flat = p;
  flat.B = Matrix::Zero(1, 1);  // zero curvature: take the full step iff it descends
  CHECK(exact_line_search(flat, y, d, 3.0) == doctest::Approx(3.0));
  CHECK(exact_line_search(flat, y, -d, 3.0) == 0.0);
}

TEST_CASE("gap certificate is zero at the optimum and positive elsewhere") {
  const QuadraticProblem p = one_dim(0.5, 1.0);
  CHECK(certify_gap(p, Vector::Constant(1, 0.5)) == doctest::Approx(0.0));
  CHECK(certify_gap(p, Vector::Constant(1, 1.0)) > 0.0);
  QuadraticProblem unbounded = p;
  unbounded.radius = kInf;
  CHECK_THROWS_AS(certify_gap(unbounded, Vector::Zero(1)), std::invalid_argument);
}

TEST_CASE("default start vertex is the lmo at the origin gradient") {
  QuadraticProblem p = one_dim(2.0, 1.0);
  const Vertex v = default_start_vertex(p);
  CHECK(v.point[0] == 1.0);  // gradient at 0 is negative, so the +1 vertex
  CHECK(v.key == 0);
}

TEST_CASE("agd matches the spd solve on random unconstrained problems") {
  Rng rng(555);
  for (int trial = 0; trial < 5; ++trial) {
    Vector target(6);
    for (Index j = 0; j < 6; ++j) target[j] = rng.uniform(-0.5, 0.5);
    QuadraticProblem p = problem_with_minimizer(rng, 60, 6, target, kInf);
    SolverLimits limits;
    limits.max_iterations = 10000;
    limits.stall_threshold = 1e-18;
    limits.stall_patience = 20;
    const SolverResult res = solve_agd(p, Vector::Zero(6), limits);
    const Vector oracle = solve_spd(p.B, -p.r);
    CHECK(res.objective <= p.value(oracle) + 1e-6);
    CHECK((res.y - target).lpNorm<Eigen::Infinity>() <= 1e-4);
  }
}

TEST_CASE("agd detects vanishing at the warm start without iterating") {
  Rng rng(556);
  QuadraticProblem p = problem_with_minimizer(rng, 40, 4, Vector::Zero(4), kInf);
  SolverLimits limits;
  limits.vanishing_threshold = 1e-8;
  const SolverResult res = solve_agd(p, Vector::Zero(4), limits);  // start at the optimum
  CHECK(res.termination == Termination::vanishing_detected);
  CHECK(res.iterations <= 2);
  CHECK(res.objective <= 1e-8);
}

TEST_CASE("cg started at an interior optimum terminates immediately") {
  QuadraticProblem p = one_dim(0.3, 1.0);
  const SolverResult res = solve_cg(p, Vector::Constant(1, 0.3));
  CHECK(res.termination == Termination::gap_reached);
  CHECK(res.iterations == 0);
  CHECK(res.y[0] == doctest::Approx(0.3));
}

TEST_CASE("cg from a vertex converges linearly to an interior optimum") {
  QuadraticProblem p = one_dim(0.3, 1.0);
  SolverLimits limits;
  limits.epsilon = 1e-10;
  const Vertex start = default_start_vertex(p);
  const SolverResult res = solve_cg(p, start.point, limits);
  CHECK(res.termination == Termination::gap_reached);
  CHECK(res.y[0] == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("cg finds a boundary optimum exactly") {
  QuadraticProblem p = one_dim(2.0, 1.0);  // constrained minimum at the +1 vertex
  const SolverResult res = solve_cg(p, default_start_vertex(p).point);
  CHECK(res.termination == Termination::gap_reached);
  CHECK(res.y[0] == doctest::Approx(1.0));
  CHECK(res.objective == doctest::Approx(1.0));
}

TEST_CASE("cg rejects infeasible starts") {
  QuadraticProblem p = one_dim(0.0, 1.0);
  CHECK_THROWS_AS(solve_cg(p, Vector::Constant(1, 1.5)), std::invalid_argument);
}

TEST_CASE("nonvanishing is certified once the dual bound clears the threshold") {
  QuadraticProblem p{Matrix::Identity(2, 2), Vector(2), 5.0, 1, 1.0};
  p.r << -2.0, -1.0;  // unconstrained optimum (2,1), constrained f* = 2
  SolverLimits limits;
  limits.nonvanishing_threshold = 1.0;
  Vector y0(2);
  y0 << 0.9, 0.0;
  const SolverResult res = solve_cg(p, y0, limits);
  CHECK(res.termination == Termination::nonvanishing_certified);
  CHECK(res.objective - res.fw_gap > 1.0);
}

TEST_CASE("vanishing outranks the gap check") {
  QuadraticProblem p = one_dim(0.3, 1.0);
  SolverLimits limits;
  limits.vanishing_threshold = 10.0;  // every feasible point qualifies
  const SolverResult res = solve_cg(p, default_start_vertex(p).point, limits);
  CHECK(res.termination == Termination::vanishing_detected);
  CHECK(res.iterations == 0);
}

TEST_CASE("iteration cap and stall rule terminate") {
  QuadraticProblem p = one_dim(0.3, 1.0);
  SolverLimits cap;
  cap.max_iterations = 0;
  CHECK(solve_cg(p, default_start_vertex(p).point, cap).termination == Termination::max_iters);

  SolverLimits stall;
  stall.stall_threshold = 1e9;  // no step can make this much progress
  stall.stall_patience = 1;
  const SolverResult res = solve_cg(p, default_start_vertex(p).point, stall);
  CHECK(res.termination == Termination::progress_stall);
  CHECK(res.iterations >= 1);
}

TEST_CASE("pcg resolves a strictly interior optimum through a vertex mix") {
  QuadraticProblem p = one_dim(0.5, 1.0);
  SolverLimits limits;
  limits.epsilon = 1e-12;
  const SolverResult res = solve_pcg(p, limits);
  CHECK(res.termination == Termination::gap_reached);
  CHECK(res.y[0] == doctest::Approx(0.5));
  // The mix is 0.75 * (+1) + 0.25 * (-1).
  double sum = 0.0, reconstructed = 0.0;
  for (const auto& [key, w] : res.active_weights) {
    sum += w;
    reconstructed += decode_key(key, 1, 1.0)[0] * w;
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK(reconstructed == doctest::Approx(0.5));
}

TEST_CASE("bpcg started at the optimal vertex stops at once") {
  QuadraticProblem p = one_dim(2.0, 1.0);
  const Vertex opt{Vector::Constant(1, 1.0), 0};
  const SolverResult res = solve_bpcg(p, opt);
  CHECK(res.termination == Termination::gap_reached);
  CHECK(res.iterations == 0);
  CHECK(res.y[0] == 1.0);
}

TEST_CASE("bpcg recovers a ten dimensional interior optimum to high accuracy") {
  Rng rng(808);
  Vector target(10);
  for (Index j = 0; j < 10; ++j) target[j] = rng.uniform(-0.03, 0.03);
  QuadraticProblem p = problem_with_minimizer(rng, 100, 10, target, 1.0);
  SolverLimits limits;
  limits.epsilon = 1e-12;
  const SolverResult res = solve_bpcg(p, limits);
  CHECK(res.termination == Termination::gap_reached);
  CHECK((res.y - target).lpNorm<Eigen::Infinity>() <= 1e-5);
  CHECK(res.objective <= 1e-11);
}

TEST_CASE("fw family invariants: feasibility, monotone descent, weight bookkeeping") {
  Rng rng(2718);
  for (int trial = 0; trial < 8; ++trial) {
    const Index dim = 2 + static_cast<Index>(rng.below(5));
    Vector target(dim);
    for (Index j = 0; j < dim; ++j) target[j] = rng.uniform(-0.6, 0.6);
    const double radius = 1.0;
    QuadraticProblem p = problem_with_minimizer(rng, 10 * dim, dim, target, radius);

    const Vector start = default_start_vertex(p).point;
    for (int which = 0; which < 3; ++which) {
      std::ostringstream trace;
      SolverLimits limits;
      limits.epsilon = 1e-9;
      limits.trace = &trace;
      SolverResult res;
      if (which == 0)
        res = solve_cg(p, start, limits);
      else if (which == 1)
        res = solve_pcg(p, limits);
      else
        res = solve_bpcg(p, limits);

      CHECK(res.y.lpNorm<1>() <= radius + 1e-9);
      CHECK(res.objective == doctest::Approx(p.value(res.y)).epsilon(1e-12));

      // Objective column of the trace must never increase.
      std::istringstream rows(trace.str());
      std::string line;
      double prev = kInf;
      while (std::getline(rows, line)) {
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = line.find(',', c1 + 1);
        const double f = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(f <= prev + 1e-12);
        prev = f;
      }

      // Active weights form a convex combination that reconstructs y.
      double sum = 0.0;
      Vector recon = Vector::Zero(dim);
      for (const auto& [key, w] : res.active_weights) {
        CHECK(w >= -1e-12);
        sum += w;
        // Point starts ride along under a sentinel key.
        recon += w * (key == ~std::uint64_t{0} ? start : decode_key(key, dim, radius));
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      CHECK((recon - res.y).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("cg carries an interior start as a pseudo vertex") {
  QuadraticProblem p = one_dim(0.2, 1.0);
  SolverLimits limits;
  limits.epsilon = 1e-10;
  Vector y0 = Vector::Constant(1, -0.4);
  const SolverResult res = solve_cg(p, y0, limits);
  CHECK(res.y[0] == doctest::Approx(0.2).epsilon(1e-8));
  // Reconstruction including the pseudo vertex at the start point.
  double sum = 0.0, recon = 0.0;
  for (const auto& [key, w] : res.active_weights) {
    sum += w;
    recon += w * (key == ~std::uint64_t{0} ? y0[0] : decode_key(key, 1, 1.0)[0]);
  }
  CHECK(sum == doctest::Approx(1.0));
  CHECK(recon == doctest::Approx(res.y[0]).epsilon(1e-9));
}

TEST_CASE("termination names are stable") {
  CHECK(std::string(to_string(Termination::gap_reached)) == "gap_reached");
  CHECK(std::string(to_string(Termination::max_iters)) == "max_iters");
  CHECK(std::string(to_string(Termination::progress_stall)) == "progress_stall");
  CHECK(std::string(to_string(Termination::vanishing_detected)) == "vanishing_detected");
  CHECK(std::string(to_string(Termination::nonvanishing_certified)) == "nonvanishing_certified");
}
