#pragma once

#include <vector>

#include "vanish/types.hpp"

namespace vanish {

// A monomial in n variables, stored as its exponent vector.
// The constant monomial has all exponents zero.
class Term {
 public:
  Term() = default;
  explicit Term(IntVector exponents) : exps_(std::move(exponents)) {}
  static Term one(int n) { return Term(IntVector::Zero(n)); }
  static Term variable(int n, int i);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return exps_.sum(); }
  int exponent(int i) const { return exps_[i]; }
  const IntVector& exponents() const { return exps_; }

  Term times_variable(int i) const;
  // Quotient by x_i. Caller must ensure exponent(i) >= 1.
  Term divided_by_variable(int i) const;

  bool operator==(const Term& rhs) const { return exps_ == rhs.exps_; }

 private:
  IntVector exps_;
};

using TermList = std::vector<Term>;

// Degree-lexicographic total order: lower total degree first; on equal
// degree the term with the larger exponent on the earliest differing
// variable comes first, so x1 < x2 < ... < xn and x1^2 < x1*x2.
// Returns <0, 0, >0 like strcmp.
int deglex_compare(const Term& a, const Term& b);
inline bool deglex_less(const Term& a, const Term& b) { return deglex_compare(a, b) < 0; }

// True when t divides u componentwise. Terms must have equal nvars.
bool divides(const Term& t, const Term& u);

// Position of t in the deglex-sorted list, or -1 if absent.
Index find_term(const TermList& sorted, const Term& t);
inline bool contains_term(const TermList& sorted, const Term& t) { return find_term(sorted, t) >= 0; }

// All u of total degree d such that every proper divisor of u lies in O.
// O must contain the constant term and be closed under division; result is
// deglex-sorted. Implemented by multiplying the degree-(d-1) slice of O by
// each variable rather than scanning all of T_d.
TermList border(const TermList& O, int d);

// Every term of total degree exactly d over n variables, deglex-sorted.
// Exhaustive; meant for small instances and as the reference for border.
TermList generate_degree_terms(int n, int d);

}  // namespace vanish
