#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "vanish/eval.hpp"
#include "vanish/gram.hpp"
#include "vanish/solver.hpp"
#include "vanish/term.hpp"

namespace vanish {

enum class SolverId { agd, cg, pcg, bpcg };
enum class BoostMode { plain, ihb, wihb };

const char* to_string(SolverId s);
const char* to_string(BoostMode m);
std::optional<SolverId> parse_solver(const std::string& name);
std::optional<BoostMode> parse_mode(const std::string& name);

// Interior warm starts only make sense where they are feasible by
// construction: ihb pairs with agd or cg, wihb pairs with bpcg.
bool mode_allowed(SolverId solver, BoostMode mode);

struct OaviOptions {
  SolverId solver = SolverId::cg;
  BoostMode mode = BoostMode::ihb;
  double epsilon = -1.0;          // <= 0 picks the default 0.01 * psi
  int max_iterations = 10000;
  double stall_threshold = -1.0;  // < 0 picks 0.0001 * psi; exactly 0 disables stalling
  bool early_decisions = true;    // let solvers stop on vanishing / nonvanishing certificates
  std::ostream* trace = nullptr;
};

struct FitStats {
  long long solver_iterations = 0;
  long long candidates = 0;
};

struct GeneratorModel {
  int n = 0;
  double psi = 0.0;
  double tau = 0.0;
  SolverId solver = SolverId::cg;
  BoostMode mode = BoostMode::ihb;
  TermList O;                          // deglex-sorted order ideal, divisor-closed
  std::vector<Polynomial> generators;  // construction order (deglex over leading terms)
  int max_degree = 0;                  // largest degree among O and generator leading terms
  std::optional<long long> boost_disabled_at;  // candidate index where the warm start fell back
  FitStats stats;
};

// Construct generators of the approximate vanishing ideal of the rows of X.
// X must be scaled to [0,1] per coordinate, psi > 0, tau >= 2. Starting from
// O = {1}, each border term u in deglex order is fit against the columns of
// O(X); candidates whose best fit has mean squared error <= psi become
// generators, the rest extend O. Stops when the border empties.
GeneratorModel oavi_fit(const Matrix& X, double psi, double tau, const OaviOptions& opts = {});

// Warm-start vector -N r, the minimizer of the unconstrained fit when N is
// the up-to-date inverse Gram matrix. State must be valid.
Vector ihb_start_vector(const GramInverseState& state, const Vector& r);

// True when y0 lies strictly outside the feasible ball, i.e. ||y0||_1 > tau - 1.
bool inf_check(const Vector& y0, double tau);

// ceil(-log(psi) / log 4): no chain of border candidates survives past this
// degree on [0,1]-scaled data when tau >= (3/2)^cap.
int theorem_degree_cap(double psi);

bool check_degree_bound(const GeneratorModel& model);

// Direct train-set diagnostics: largest generator mse over X and largest
// l1 norm; used to audit fitted models.
struct ModelAudit {
  double max_mse = 0.0;
  double max_l1 = 0.0;
};
ModelAudit audit_model(const GeneratorModel& model, const Matrix& X);

}  // namespace vanish
