#include "vanish/oavi.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace vanish {

const char* to_string(SolverId s) {
  switch (s) {
    case SolverId::agd: return "agd";
    case SolverId::cg: return "cg";
    case SolverId::pcg: return "pcg";
    case SolverId::bpcg: return "bpcg";
  }
  return "unknown";
}

const char* to_string(BoostMode m) {
  switch (m) {
    case BoostMode::plain: return "plain";
    case BoostMode::ihb: return "ihb";
    case BoostMode::wihb: return "wihb";
  }
  return "unknown";
}

std::optional<SolverId> parse_solver(const std::string& name) {
  if (name == "agd") return SolverId::agd;
  if (name == "cg") return SolverId::cg;
  if (name == "pcg") return SolverId::pcg;
  if (name == "bpcg") return SolverId::bpcg;
  return std::nullopt;
}

std::optional<BoostMode> parse_mode(const std::string& name) {
  if (name == "plain") return BoostMode::plain;
  if (name == "ihb") return BoostMode::ihb;
  if (name == "wihb") return BoostMode::wihb;
  return std::nullopt;
}

bool mode_allowed(SolverId solver, BoostMode mode) {
  switch (mode) {
    case BoostMode::plain: return true;
    case BoostMode::ihb: return solver == SolverId::agd || solver == SolverId::cg;
    case BoostMode::wihb: return solver == SolverId::bpcg;
  }
  return false;
}

Vector ihb_start_vector(const GramInverseState& state, const Vector& r) {
  if (!state.valid()) throw std::invalid_argument("ihb_start_vector: inverse not maintained");
  if (r.size() != state.size()) throw std::invalid_argument("ihb_start_vector: r has wrong length");
  return -(state.N() * r);
}

bool inf_check(const Vector& y0, double tau) { return y0.lpNorm<1>() > tau - 1.0; }

int theorem_degree_cap(double psi) {
  if (!(psi > 0.0) || psi >= 1.0) throw std::invalid_argument("theorem_degree_cap: need 0 < psi < 1");
  return static_cast<int>(std::ceil(-std::log(psi) / std::log(4.0)));
}

bool check_degree_bound(const GeneratorModel& model) {
  if (model.psi >= 1.0) return true;
  return model.max_degree <= theorem_degree_cap(model.psi);
}

ModelAudit audit_model(const GeneratorModel& model, const Matrix& X) {
  ModelAudit audit;
  if (model.generators.empty()) return audit;
  const Matrix vals = eval_polynomials(model.generators, model.O, X);
  for (Index k = 0; k < vals.cols(); ++k) {
    audit.max_mse = std::max(audit.max_mse, mse(vals.col(k)));
    audit.max_l1 = std::max(audit.max_l1, model.generators[static_cast<std::size_t>(k)].l1_norm());
  }
  return audit;
}

namespace {

struct FitContext {
  const Matrix& X;
  double psi;
  double tau;
  OaviOptions opts;
  SolverLimits limits;
  double radius;  // tau - 1 for the ball solvers, +inf for agd
};

SolverLimits make_limits(const OaviOptions& opts, double psi) {
  SolverLimits lims;
  lims.epsilon = opts.epsilon > 0.0 ? opts.epsilon : 0.01 * psi;
  lims.max_iterations = opts.max_iterations;
  if (opts.stall_threshold < 0.0) {
    lims.stall_threshold = 1e-4 * psi;
  } else {
    lims.stall_threshold = opts.stall_threshold;  // 0 disables
  }
  lims.stall_patience = opts.solver == SolverId::agd ? 20 : 1;
  if (opts.early_decisions) {
    lims.vanishing_threshold = psi;
    lims.nonvanishing_threshold = psi;
  }
  lims.trace = opts.trace;
  return lims;
}

SolverResult run_plain(const FitContext& ctx, const QuadraticProblem& problem) {
  switch (ctx.opts.solver) {
    case SolverId::agd: return solve_agd(problem, Vector::Zero(problem.dim()), ctx.limits);
    case SolverId::cg: return solve_cg(problem, default_start_vertex(problem).point, ctx.limits);
    case SolverId::pcg: return solve_pcg(problem, ctx.limits);
    case SolverId::bpcg: return solve_bpcg(problem, ctx.limits);
  }
  throw std::logic_error("run_plain: unreachable");
}

}  // namespace

GeneratorModel oavi_fit(const Matrix& X, double psi, double tau, const OaviOptions& opts) {
  const Index m = X.rows();
  const int n = static_cast<int>(X.cols());
  if (m < 1 || n < 1) throw std::invalid_argument("oavi_fit: X must be nonempty");
  if (!std::isfinite(psi) || psi <= 0.0) throw std::invalid_argument("oavi_fit: psi must be positive");
  if (!std::isfinite(tau) || tau < 2.0) throw std::invalid_argument("oavi_fit: tau must be >= 2");
  if ((X.array() < -1e-9).any() || (X.array() > 1.0 + 1e-9).any())
    throw std::invalid_argument("oavi_fit: X must be scaled to [0,1]");
  if (!mode_allowed(opts.solver, opts.mode))
    throw std::invalid_argument("oavi_fit: unsupported solver/mode pairing");

  FitContext ctx{X, psi, tau, opts, make_limits(opts, psi),
                 opts.solver == SolverId::agd ? std::numeric_limits<double>::infinity() : tau - 1.0};

  GeneratorModel model;
  model.n = n;
  model.psi = psi;
  model.tau = tau;
  model.solver = opts.solver;
  model.mode = opts.mode;

  EvalMatrix A(m);
  A.append(Term::one(n), Vector::Ones(m));
  GramInverseState gram = GramInverseState::initial(Vector::Ones(m), opts.mode != BoostMode::plain);
  model.O.push_back(Term::one(n));

  bool boosting = opts.mode != BoostMode::plain;
  const double inv_m = 1.0 / static_cast<double>(m);

  auto note_boost_loss = [&](long long candidate_index) {
    if (boosting) {
      boosting = false;
      model.boost_disabled_at = candidate_index;
    }
  };

  for (int d = 1;; ++d) {
    const TermList frontier = border(model.O, d);
    if (frontier.empty()) break;
    model.max_degree = d;

    for (const Term& u : frontier) {
      const long long cand_idx = model.stats.candidates++;
      const Vector b = eval_term_column(u, A, X);
      const double btb = b.squaredNorm();
      const Index l = A.cols();

      if (btb == 0.0) {
        // The term itself vanishes on every sample; no fit needed.
        model.generators.push_back({u, model.O, Vector::Zero(l)});
        continue;
      }

      const Vector r = A.matrix().transpose() * b;

      QuadraticProblem problem;
      problem.B = gram.B();
      problem.r = r;
      problem.c0 = btb;
      problem.m = m;
      problem.radius = ctx.radius;

      auto direct_mse = [&](const Vector& y) {
        return (A.matrix() * y + b).squaredNorm() * inv_m;
      };

      Vector coeffs;
      double err = 0.0;

      if (opts.mode == BoostMode::wihb && boosting && gram.valid()) {
        const Vector y0 = ihb_start_vector(gram, r);
        if (inf_check(y0, tau)) {
          note_boost_loss(cand_idx);
          const SolverResult res = run_plain(ctx, problem);
          model.stats.solver_iterations += res.iterations;
          coeffs = res.y;
          err = direct_mse(coeffs);
        } else {
          const SolverResult probe = solve_cg(problem, y0, ctx.limits);
          model.stats.solver_iterations += probe.iterations;
          const double probe_err = direct_mse(probe.y);
          if (probe_err <= psi) {
            // Vanishing confirmed; re-solve from a vertex for a sparse
            // representative and keep it only if it also vanishes.
            const SolverResult sparse = solve_bpcg(problem, ctx.limits);
            model.stats.solver_iterations += sparse.iterations;
            const double sparse_err = direct_mse(sparse.y);
            if (sparse_err <= psi) {
              coeffs = sparse.y;
              err = sparse_err;
            } else {
              coeffs = probe.y;
              err = probe_err;
            }
          } else {
            coeffs = probe.y;
            err = probe_err;
          }
        }
      } else if (opts.mode == BoostMode::ihb && boosting && gram.valid()) {
        const Vector y0 = ihb_start_vector(gram, r);
        if (opts.solver == SolverId::cg && inf_check(y0, tau)) {
          note_boost_loss(cand_idx);
          const SolverResult res = run_plain(ctx, problem);
          model.stats.solver_iterations += res.iterations;
          coeffs = res.y;
          err = direct_mse(coeffs);
        } else {
          const SolverResult res = opts.solver == SolverId::agd ? solve_agd(problem, y0, ctx.limits)
                                                                : solve_cg(problem, y0, ctx.limits);
          model.stats.solver_iterations += res.iterations;
          coeffs = res.y;
          err = direct_mse(coeffs);
        }
      } else {
        const SolverResult res = run_plain(ctx, problem);
        model.stats.solver_iterations += res.iterations;
        coeffs = res.y;
        err = direct_mse(coeffs);
      }

      if (err <= psi) {
        model.generators.push_back({u, model.O, coeffs});
      } else {
        model.O.push_back(u);
        A.append(u, b);
        const bool was_valid = gram.valid();
        gram.append(r, btb);
        if (was_valid && !gram.valid()) note_boost_loss(cand_idx);
      }
    }
  }
  return model;
}

}  // namespace vanish
