#pragma once

// Shared Frank-Wolfe iteration driver. The quadratic solvers and the squared
// hinge classifier both instantiate fw_solve with their own objective; an
// objective provides value(y), gradient(y) and line_search(y, d, gmax).

#include <cstddef>
#include <utility>
#include <vector>

#include "vanish/solver.hpp"

namespace vanish::detail {

enum class FwVariant { cg, pcg, bpcg };

struct ActiveVertex {
  Vector point;
  std::uint64_t key = 0;
  double weight = 0.0;
};

using ActiveSet = std::vector<ActiveVertex>;

// Key for the warm-start pseudo vertex vanilla FW carries when started from
// an interior point. Never produced by an LMO.
inline constexpr std::uint64_t kStartKey = ~std::uint64_t{0};

// Index of the active vertex maximizing (dir=+1) or minimizing (dir=-1)
// <grad, v.point>; exact ties go to the lowest key.
inline std::size_t select_active(const ActiveSet& s, const Vector& grad, int dir) {
  std::size_t best = 0;
  double best_val = dir * grad.dot(s[0].point);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double val = dir * grad.dot(s[i].point);
    if (val > best_val || (val == best_val && s[i].key < s[best].key)) {
      best = i;
      best_val = val;
    }
  }
  return best;
}

inline void add_vertex_weight(ActiveSet& s, const Vertex& v, double w) {
  for (ActiveVertex& a : s) {
    if (a.key == v.key) {
      a.weight += w;
      return;
    }
  }
  s.push_back({v.point, v.key, w});
}

template <class Objective>
SolverResult fw_solve(const Objective& obj, const Lmo& lmo, FwVariant variant, Vector y,
                      ActiveSet active, const SolverLimits& limits) {
  SolverResult res;
  double f = obj.value(y);
  int stall_count = 0;
  long long iters = 0;

  auto finish = [&](double gap, Termination why) {
    res.y = std::move(y);
    res.objective = f;
    res.fw_gap = gap;
    res.iterations = iters;
    res.termination = why;
    res.active_weights.reserve(active.size());
    for (const ActiveVertex& a : active) res.active_weights.emplace_back(a.key, a.weight);
    return res;
  };
  auto current_gap = [&]() {
    const Vector g = obj.gradient(y);
    return g.dot(y - lmo(g).point);
  };

  while (true) {
    const Vector grad = obj.gradient(y);
    const Vertex w = lmo(grad);
    const double gap = grad.dot(y - w.point);
    if (limits.trace) (*limits.trace) << iters << ',' << f << ',' << gap << '\n';

    if (limits.vanishing_threshold >= 0.0 && f <= limits.vanishing_threshold)
      return finish(gap, Termination::vanishing_detected);
    if (gap <= limits.epsilon) return finish(gap, Termination::gap_reached);
    if (limits.nonvanishing_threshold >= 0.0 && f - gap > limits.nonvanishing_threshold)
      return finish(gap, Termination::nonvanishing_certified);
    if (iters >= limits.max_iterations) return finish(gap, Termination::max_iters);

    // Direction selection. A global FW step rescales every weight and may add
    // w to the active set; a pairwise step moves weight from the away vertex
    // onto a target vertex and never grows the set beyond that target.
    bool fw_step = true;
    std::size_t away_idx = 0;
    Vertex target = w;
    Vector d;
    double gmax = 1.0;

    if (variant == FwVariant::pcg) {
      fw_step = false;
      away_idx = select_active(active, grad, +1);
      d = w.point - active[away_idx].point;
      gmax = active[away_idx].weight;
    } else if (variant == FwVariant::bpcg) {
      away_idx = select_active(active, grad, +1);
      const std::size_t local_idx = select_active(active, grad, -1);
      const double local_score =
          grad.dot(active[local_idx].point) - grad.dot(active[away_idx].point);
      if (grad.dot(w.point - y) >= local_score) {
        fw_step = false;
        target = Vertex{active[local_idx].point, active[local_idx].key};
        d = target.point - active[away_idx].point;
        gmax = active[away_idx].weight;
      } else {
        d = w.point - y;
      }
    } else {
      d = w.point - y;
    }

    const double gamma = obj.line_search(y, d, gmax);
    y += gamma * d;
    if (fw_step) {
      for (ActiveVertex& a : active) a.weight *= (1.0 - gamma);
      add_vertex_weight(active, w, gamma);
      if (gamma >= 1.0) {
        ActiveSet keep;
        for (ActiveVertex& a : active)
          if (a.key == w.key) keep.push_back(std::move(a));
        active.swap(keep);
      }
    } else {
      add_vertex_weight(active, target, gamma);
      if (gamma >= gmax) {
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(away_idx));
      } else {
        active[away_idx].weight -= gamma;
      }
    }

    ++iters;
    const double fnew = obj.value(y);
    const double progress = f - fnew;
    f = fnew;
    if (limits.stall_threshold > 0.0) {
      if (progress < limits.stall_threshold) {
        if (++stall_count >= limits.stall_patience)
          return finish(current_gap(), Termination::progress_stall);
      } else {
        stall_count = 0;
      }
    }
  }
}

}  // namespace vanish::detail
