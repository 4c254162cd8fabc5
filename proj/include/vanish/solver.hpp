#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include "vanish/types.hpp"

namespace vanish {

// Minimize over the l1 ball of radius `radius`
//   f(y) = (1/m) (y^T B y + 2 r^T y + c0),
// the Gram form of (1/m)||A y + b||^2 with B = A^T A, r = A^T b, c0 = ||b||^2.
// Every solver touches the problem only through B, r, c0, so iterations cost
// O(dim^2) regardless of the sample count m.
struct QuadraticProblem {
  Matrix B;
  Vector r;
  double c0 = 0.0;
  Index m = 1;
  double radius = 1.0;  // l1-ball radius; +infinity means unconstrained

  Index dim() const { return r.size(); }
  double value(const Vector& y) const;
  Vector gradient(const Vector& y) const;
  double line_search(const Vector& y, const Vector& d, double gmax) const;
};

enum class Termination {
  gap_reached,
  max_iters,
  progress_stall,
  vanishing_detected,
  nonvanishing_certified,
};

const char* to_string(Termination t);

struct SolverLimits {
  double epsilon = 1e-6;         // FW gap target
  int max_iterations = 10000;
  double stall_threshold = -1.0; // minimum objective progress per check; <= 0 disables
  int stall_patience = 1;        // consecutive stalled checks before stopping
  double vanishing_threshold = -1.0;     // stop once f <= this; < 0 disables
  double nonvanishing_threshold = -1.0;  // stop once f - gap > this; < 0 disables
  std::ostream* trace = nullptr;         // CSV rows "iteration,objective,gap" when set
};

struct SolverResult {
  Vector y;
  double objective = 0.0;
  double fw_gap = 0.0;  // final FW gap; final gradient max-norm for solve_agd
  long long iterations = 0;
  Termination termination = Termination::max_iters;
  // Final active vertex weights for the FW family, keyed by LMO vertex ids.
  std::vector<std::pair<std::uint64_t, double>> active_weights;
};

// One vertex of the feasible region as produced by a linear minimization
// oracle. `key` is a stable identity used for active-set bookkeeping.
struct Vertex {
  Vector point;
  std::uint64_t key = 0;
};

using Lmo = std::function<Vertex(const Vector& gradient)>;

// LMO over the l1 ball: radius * sign * e_i with i maximizing |gradient_i|
// and sign = -sign(gradient_i). Ties pick the lowest index; a zero entry
// gets positive sign. Keys are 2*i + (sign < 0 ? 1 : 0).
Vertex lmo_l1(const Vector& gradient, double radius);

// argmin over [0, gmax] of f along y + gamma * d, in closed form:
// clamp(-<grad f(y), d> / ((2/m) d^T B d), 0, gmax). A zero-curvature
// direction returns gmax when it descends and 0 otherwise.
double exact_line_search(const QuadraticProblem& p, const Vector& y, const Vector& d, double gmax);

// FW gap <grad f(y), y - w>, w = lmo_l1(grad f(y), radius). Finite radius only.
double certify_gap(const QuadraticProblem& p, const Vector& y);

// Accelerated gradient descent on the unconstrained problem: constant step
// 1/L Nesterov with L estimated by power iteration on (2/m) B. Stops on the
// iteration cap, the stalled-progress rule, or the vanishing threshold.
SolverResult solve_agd(const QuadraticProblem& p, const Vector& y0, const SolverLimits& limits = {});

// Vanilla Frank-Wolfe. Accepts any feasible start, interior points included;
// throws when ||y0||_1 exceeds the radius.
SolverResult solve_cg(const QuadraticProblem& p, const Vector& y0, const SolverLimits& limits = {});

// Pairwise Frank-Wolfe from a vertex: every step shifts weight from the
// current away vertex onto the global FW vertex.
SolverResult solve_pcg(const QuadraticProblem& p, const Vertex& start, const SolverLimits& limits = {});
SolverResult solve_pcg(const QuadraticProblem& p, const SolverLimits& limits = {});

// Blended pairwise Frank-Wolfe from a vertex: local pairwise steps over the
// active set when they dominate the global FW direction, global steps
// otherwise. Local steps never grow the active set.
SolverResult solve_bpcg(const QuadraticProblem& p, const Vertex& start, const SolverLimits& limits = {});
SolverResult solve_bpcg(const QuadraticProblem& p, const SolverLimits& limits = {});

// Deterministic start for the vertex-started solvers: LMO at the gradient of 0.
Vertex default_start_vertex(const QuadraticProblem& p);

}  // namespace vanish
