#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "vanish/data.hpp"
#include "vanish/eval.hpp"
#include "vanish/gram.hpp"

using namespace vanish;

namespace {

Term make(std::initializer_list<int> exps) {
  IntVector v(static_cast<Index>(exps.size()));
  Index i = 0;
  for (int e : exps) v[i++] = e;
  return Term(v);
}

Matrix random_samples(Rng& rng, Index m, Index n) {
  Matrix X(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) X(i, j) = rng.uniform();
  return X;
}

}  // namespace

TEST_CASE("direct term evaluation is the power product") {
  Matrix X(2, 3);
  X << 2.0, 3.0, 4.0,  //
      0.5, 1.0, 2.0;
  const Vector v = eval_term_direct(make({2, 0, 1}), X);
  CHECK(v[0] == doctest::Approx(16.0));
  CHECK(v[1] == doctest::Approx(0.5));
  const Vector ones = eval_term_direct(Term::one(3), X);
  CHECK(ones[0] == 1.0);
  CHECK(ones[1] == 1.0);
}

TEST_CASE("eval matrix stores appended columns in order") {
  Matrix X(3, 2);
  X << 0.1, 0.2,  //
      0.3, 0.4,   //
      0.5, 0.6;
  EvalMatrix A(3);
  A.append(Term::one(2), Vector::Ones(3));
  for (int j = 0; j < 2; ++j) {
    const Term t = Term::variable(2, j);
    A.append(t, eval_term_direct(t, X));
  }
  CHECK(A.cols() == 3);
  CHECK(A.rows() == 3);
  CHECK(A.terms()[1] == Term::variable(2, 0));
  CHECK((A.col(1) - X.col(0)).norm() == doctest::Approx(0.0));
  CHECK((A.matrix().col(2) - X.col(1)).norm() == doctest::Approx(0.0));
  // Force several capacity doublings.
  EvalMatrix Wide(3);
  for (int k = 0; k < 40; ++k) Wide.append(Term::one(2), Vector::Constant(3, k));
  CHECK(Wide.cols() == 40);
  CHECK(Wide.col(17)[0] == doctest::Approx(17.0));
}

TEST_CASE("cached column evaluation equals direct evaluation") {
  Rng rng(7);
  const Matrix X = random_samples(rng, 11, 3);
  EvalMatrix A(11);
  A.append(Term::one(3), Vector::Ones(11));
  TermList pool;
  for (int d = 1; d <= 3; ++d) {
    const TermList slice = generate_degree_terms(3, d);
    pool.insert(pool.end(), slice.begin(), slice.end());
  }
  for (const Term& u : pool) {
    const Vector cached = eval_term_column(u, A, X);
    const Vector direct = eval_term_direct(u, X);
    CHECK((cached - direct).lpNorm<Eigen::Infinity>() <= 1e-12);
    A.append(u, cached);
  }
}

TEST_CASE("mse is the mean squared entry") {
  Vector v(2);
  v << 1.0, 0.0;
  CHECK(mse(v) == doctest::Approx(0.5));
  CHECK_THROWS_AS(mse(Vector()), std::invalid_argument);
}

TEST_CASE("polynomial l1 norm counts the unit leading coefficient") {
  Polynomial g;
  g.leading = make({2, 0});
  g.basis = {Term::one(2), make({1, 0})};
  g.coeffs = Vector(2);
  g.coeffs << -1.0, 0.5;
  CHECK(g.l1_norm() == doctest::Approx(2.5));
  CHECK(g.degree() == 2);
}

TEST_CASE("polynomial evaluation in border form") {
  // g = x^2 - x over one variable.
  Polynomial g;
  g.leading = make({2});
  g.basis = {Term::one(1), make({1})};
  g.coeffs = Vector(2);
  g.coeffs << 0.0, -1.0;
  Matrix Z(3, 1);
  Z << 0.0, 0.5, 1.0;
  const Vector v = eval_polynomial(g, Z);
  CHECK(v[0] == doctest::Approx(0.0));
  CHECK(v[1] == doctest::Approx(-0.25));
  CHECK(v[2] == doctest::Approx(0.0));
}

TEST_CASE("shared-cache evaluation matches per-polynomial evaluation") {
  Rng rng(99);
  const Matrix Z = random_samples(rng, 8, 2);
  const TermList O = {Term::one(2), make({1, 0}), make({0, 1}), make({1, 1})};
  std::vector<Polynomial> gens;
  Polynomial a;
  a.leading = make({2, 0});
  a.basis = O;
  a.coeffs = Vector(4);
  a.coeffs << 0.25, -1.0, 0.5, 2.0;
  gens.push_back(a);
  Polynomial b;
  b.leading = make({2, 1});
  b.basis = {Term::one(2), make({1, 0})};
  b.coeffs = Vector(2);
  b.coeffs << -0.5, 0.125;
  gens.push_back(b);

  const Matrix F = eval_polynomials(gens, O, Z);
  REQUIRE(F.cols() == 2);
  CHECK((F.col(0) - eval_polynomial(a, Z)).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((F.col(1) - eval_polynomial(b, Z)).lpNorm<Eigen::Infinity>() <= 1e-12);

  Polynomial bad = b;
  bad.basis = {make({0, 2})};  // not in O
  bad.coeffs = Vector::Constant(1, 0.5);
  CHECK_THROWS_AS(eval_polynomials({bad}, O, Z), std::invalid_argument);
}

TEST_CASE("gram state over the all-ones column") {
  const Vector ones = Vector::Ones(2);
  GramInverseState s = GramInverseState::initial(ones, true);
  CHECK(s.size() == 1);
  CHECK(s.valid());
  CHECK(s.B()(0, 0) == doctest::Approx(2.0));
  CHECK(s.N()(0, 0) == doctest::Approx(0.5));
  CHECK(s.inverse_consistency_error() <= 1e-15);
}

TEST_CASE("gram append reproduces the textbook two-column instance") {
  // Samples {0, 1}, columns 1 and x: B = [[2,1],[1,1]], N = [[1,-1],[-1,2]].
  Matrix A(2, 1);
  A << 1.0, 1.0;
  GramInverseState s = GramInverseState::initial(A.col(0), true);
  Vector b(2);
  b << 0.0, 1.0;
  gram_append(s, A, b);
  REQUIRE(s.size() == 2);
  CHECK(s.valid());
  CHECK(s.B()(0, 0) == doctest::Approx(2.0));
  CHECK(s.B()(0, 1) == doctest::Approx(1.0));
  CHECK(s.B()(1, 0) == doctest::Approx(1.0));
  CHECK(s.B()(1, 1) == doctest::Approx(1.0));
  CHECK(s.N()(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.N()(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.N()(1, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(s.N()(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.inverse_consistency_error() <= 1e-12);
}

TEST_CASE("gram chain tracks the direct inverse") {
  Rng rng(4242);
  const Index m = 20, cols = 6;
  Matrix A(m, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < m; ++i) A(i, j) = rng.uniform(-1.0, 1.0);
  GramInverseState s = GramInverseState::initial(A.col(0), true);
  for (Index j = 1; j < cols; ++j) gram_append(s, A.leftCols(j), A.col(j));
  REQUIRE(s.size() == cols);
  REQUIRE(s.valid());
  const Matrix B = A.transpose() * A;
  CHECK((Matrix(s.B()) - B).lpNorm<Eigen::Infinity>() <= 1e-10);
  const Matrix Ninv = B.inverse();
  CHECK((Matrix(s.N()) - Ninv).lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(s.inverse_consistency_error() <= 1e-8);
}

TEST_CASE("a dependent column freezes the inverse but still grows B") {
  Matrix A(3, 1);
  A << 1.0, 1.0, 1.0;
  GramInverseState s = GramInverseState::initial(A.col(0), true);
  const Vector dup = Vector::Ones(3);
  gram_append(s, A, dup);
  CHECK(s.size() == 2);
  CHECK(!s.valid());
  CHECK(std::isnan(s.inverse_consistency_error()));
  // B keeps growing after the freeze.
  Matrix A2(3, 2);
  A2 << 1.0, 1.0, 1.0, 1.0, 1.0, 1.0;
  Vector fresh(3);
  fresh << 1.0, 2.0, 3.0;
  gram_append(s, A2, fresh);
  CHECK(s.size() == 3);
  CHECK(!s.valid());
  CHECK(s.B()(2, 2) == doctest::Approx(14.0));
}

TEST_CASE("gram state rejects degenerate input") {
  CHECK_THROWS_AS(GramInverseState::initial(Vector::Zero(3), true), std::invalid_argument);
  GramInverseState s = GramInverseState::initial(Vector::Ones(3), true);
  CHECK_THROWS_AS(s.append(Vector::Zero(2), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(s.append(Vector::Zero(1), 0.0), std::invalid_argument);
  s.invalidate();
  CHECK(!s.valid());
}

TEST_CASE("untracked state never exposes an inverse") {
  GramInverseState s = GramInverseState::initial(Vector::Ones(4), false);
  CHECK(!s.valid());
  CHECK(s.size() == 1);
  CHECK(s.B()(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("spd solve matches the closed form and rejects indefinite input") {
  Matrix B = 2.0 * Matrix::Identity(2, 2);
  Vector r(2);
  r << 4.0, 6.0;
  const Vector y = solve_spd(B, r);
  CHECK(y[0] == doctest::Approx(2.0));
  CHECK(y[1] == doctest::Approx(3.0));

  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(solve_spd(bad, r), std::runtime_error);
}
