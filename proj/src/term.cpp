#include "vanish/term.hpp"

#include <algorithm>
#include <stdexcept>

namespace vanish {

Term Term::variable(int n, int i) {
  IntVector e = IntVector::Zero(n);
  e[i] = 1;
  return Term(std::move(e));
}

Term Term::times_variable(int i) const {
  IntVector e = exps_;
  e[i] += 1;
  return Term(std::move(e));
}

Term Term::divided_by_variable(int i) const {
  IntVector e = exps_;
  e[i] -= 1;
  return Term(std::move(e));
}

int deglex_compare(const Term& a, const Term& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("deglex_compare: variable count mismatch");
  const int da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  for (int i = 0; i < a.nvars(); ++i) {
    const int ea = a.exponent(i), eb = b.exponent(i);
    if (ea != eb) return ea > eb ? -1 : 1;
  }
  return 0;
}

bool divides(const Term& t, const Term& u) {
  if (t.nvars() != u.nvars()) throw std::invalid_argument("divides: variable count mismatch");
  return (t.exponents().array() <= u.exponents().array()).all();
}

Index find_term(const TermList& sorted, const Term& t) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), t, deglex_less);
  if (it != sorted.end() && *it == t) return it - sorted.begin();
  return -1;
}

TermList border(const TermList& O, int d) {
  if (d < 1) throw std::invalid_argument("border: degree must be >= 1");
  if (O.empty()) throw std::invalid_argument("border: O must contain the constant term");
  const int n = O.front().nvars();

  // Candidates: degree-(d-1) elements of O times each variable.
  TermList cand;
  for (const Term& t : O) {
    if (t.degree() != d - 1) continue;
    for (int i = 0; i < n; ++i) cand.push_back(t.times_variable(i));
  }
  std::sort(cand.begin(), cand.end(), deglex_less);
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  // Keep u only when every maximal proper divisor u/x_i is in O. With O
  // closed under division this is equivalent to checking all proper divisors.
  TermList out;
  for (const Term& u : cand) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (u.exponent(i) == 0) continue;
      if (!contains_term(O, u.divided_by_variable(i))) ok = false;
    }
    if (ok) out.push_back(u);
  }
  return out;
}

namespace {

void enumerate_terms(int n, int pos, int remaining, IntVector& scratch, TermList& out) {
  if (pos == n - 1) {
    scratch[pos] = remaining;
    out.emplace_back(scratch);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    scratch[pos] = e;
    enumerate_terms(n, pos + 1, remaining - e, scratch, out);
  }
}

}  // namespace

TermList generate_degree_terms(int n, int d) {
  if (n < 1) throw std::invalid_argument("generate_degree_terms: need n >= 1");
  if (d < 0) throw std::invalid_argument("generate_degree_terms: need d >= 0");
  TermList out;
  IntVector scratch(n);
  enumerate_terms(n, 0, d, scratch, out);
  std::sort(out.begin(), out.end(), deglex_less);
  return out;
}

}  // namespace vanish
