#include <doctest.h>

#include <cmath>

#include "mgap/bounds.hpp"
#include "mgap/sampling.hpp"
#include "mgap/structure.hpp"

using namespace mgap;

namespace {

AlgebraElement diag2(const TracialAlgebra& alg, double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return AlgebraElement(alg, {m});
}

}  // namespace

TEST_CASE("forward bounds at reference points") {
  // Degenerate point c2 = 0, p = 2.
  ForwardBounds z = forward_bound(0.0, 2.0);
  for (double b : z.case_bounds) CHECK(b <= 1.0 + 1e-12);
  CHECK(z.final_bound <= 1.0 + 1e-12);
  CHECK(z.pstar_bound == doctest::Approx(0.0));  // (1 - 2^0 * 1)^{1/2}

  // pstar bound (c2 = 0.5, p = 4): p* = 4, (1 - 2^{-2} * 0.5)^{1/4}.
  ForwardBounds f = forward_bound(0.5, 4.0);
  CHECK(f.pstar_bound == doctest::Approx(std::pow(0.875, 0.25)).epsilon(1e-14));
  CHECK(f.pstar_bound == doctest::Approx(0.96716821).epsilon(1e-7));
  // interpolation(0.5, 4) = 0.5^{1/2} * 2^{1/2} = 1: omitted.
  CHECK_FALSE(f.interpolation.has_value());
  CHECK(f.minimum_applicable <= f.final_bound);
  CHECK(f.minimum_applicable <= f.pstar_bound);
  CHECK(f.minimum_applicable < 1.0);

  // The interpolation bound appears once it is informative.
  ForwardBounds g = forward_bound(0.3, 4.0);
  REQUIRE(g.interpolation.has_value());
  CHECK(*g.interpolation ==
        doctest::Approx(std::pow(0.3, 0.5) * std::pow(2.0, 0.5)).epsilon(1e-14));

  CHECK_THROWS_AS(forward_bound(1.0, 3.0), DomainError);
  CHECK_THROWS_AS(forward_bound(0.5, 1.0), DomainError);
}

TEST_CASE("forward bounds are valid and monotone in c2") {
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.0, 8.0}) {
    double prev_final = 0.0;
    double prev_pstar = 0.0;
    for (double c2 = 0.0; c2 < 0.999; c2 += 0.015) {
      ForwardBounds f = forward_bound(c2, p);
      CHECK(f.final_bound <= 1.0 + 1e-12);
      CHECK(f.minimum_applicable < 1.0);
      // The depolarizing family has c_p = c_2 for every p, so no valid
      // bound can undercut c_2.
      CHECK(f.minimum_applicable >= c2 - 1e-12);
      CHECK(f.final_bound >= prev_final - 1e-12);
      CHECK(f.pstar_bound >= prev_pstar - 1e-12);
      prev_final = f.final_bound;
      prev_pstar = f.pstar_bound;
    }
  }
}

TEST_CASE("reverse bound evaluations") {
  // Continuity at the degenerate end: cp -> 1 gives a vacuous c2 bound -> 1.
  CHECK(reverse_bound(1.0 - 1e-12, 4.0, 1.0) == doctest::Approx(1.0));

  // (cp = 0.5, p = 4, C = 1): theta = 1/8, bound = 1 - (1/8)^{16}.
  const double expected = 1.0 - std::pow(0.125, 16.0);
  CHECK(reverse_theta(4.0) == doctest::Approx(0.125));
  CHECK(reverse_bound(0.5, 4.0, 1.0) == doctest::Approx(expected).epsilon(1e-15));

  // (cp = 0, p = 1.5, C = 1): theta = 3/16, bound = 1 - (2/3)^{32/3}.
  CHECK(reverse_theta(1.5) == doctest::Approx(3.0 / 16.0));
  CHECK(reverse_bound(0.0, 1.5, 1.0) ==
        doctest::Approx(1.0 - std::pow(2.0 / 3.0, 32.0 / 3.0)).epsilon(1e-14));

  // Large C clamps to [0, 1].
  CHECK(reverse_bound(0.0, 1.5, 100.0) == 0.0);

  CHECK_THROWS_AS(reverse_bound(0.5, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(reverse_bound(0.5, 4.0, 0.0), DomainError);
}

TEST_CASE("asymptotic slopes") {
  // Closed form at p = 2: the pstar bound reduces to sqrt(c2), slope 1/2.
  CHECK(asymptotic_slope(2.0, SlopeTarget::kPstar) ==
        doctest::Approx(0.5).epsilon(1e-3));

  CHECK(asymptotic_slope(1.5, SlopeTarget::kSplit) > 0.0);

  // The pstar rate beats the case-split rate for p > 2.
  CHECK(asymptotic_slope(4.0, SlopeTarget::kPstar) >
        asymptotic_slope(4.0, SlopeTarget::kSplit));

  for (double p : {1.2, 1.5, 3.0, 4.0, 8.0}) {
    CHECK(asymptotic_slope(p, SlopeTarget::kSplit) > 0.0);
    CHECK(asymptotic_slope(p, SlopeTarget::kPstar) > 0.0);
  }
}

TEST_CASE("psmall checker") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  MarkovMap id = identity_channel(m2);
  AlgebraElement one = AlgebraElement::identity(m2);
  IneqReport r1 = check_psmall(id, one, 1.5);
  CHECK(r1.pass);
  CHECK(r1.lhs == doctest::Approx(r1.rhs).epsilon(1e-12));

  // E_scalars with a projection: equality 1/2 = (1/2)^{1/3} (1/2)^{2/3}.
  MarkovMap e = conditional_expectation(scalar_subalgebra(m2));
  IneqReport r2 = check_psmall(e, diag2(m2, 1.0, 0.0), 1.5);
  CHECK(r2.pass);
  CHECK(r2.lhs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r2.rhs == doctest::Approx(0.5).epsilon(1e-12));

  MarkovMap dep = depolarizing_channel(m2, 0.3);
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    IneqReport r = check_psmall(dep, random_positive(m2, rng), 1.05 + 0.85 * rng.uniform());
    CHECK(r.pass);
  }

  CHECK_THROWS_AS(check_psmall(id, one, 2.5), DomainError);
  CHECK_THROWS_AS(check_psmall(id, diag2(m2, 1.0, -1.0), 1.5), DomainError);
}

TEST_CASE("pbig checker") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  MarkovMap id = identity_channel(m2);
  Rng rng(5);
  for (double alpha : {1.0, 1.5, 2.0, 3.0}) {
    for (double p : {1.0, 2.0, 3.5}) {
      IneqReport r = check_pbig(id, random_positive(m2, rng), alpha, p);
      CHECK(r.pass);
      CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-9));
    }
  }

  // tau(x^2) = 1/2 against (tau x)^2 = 1/4.
  MarkovMap e = conditional_expectation(scalar_subalgebra(m2));
  IneqReport r = check_pbig(e, diag2(m2, 1.0, 0.0), 2.0, 1.0);
  CHECK(r.pass);
  CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-12));

  Matrix mask(2, 2);
  mask << 1.0, 0.4, 0.4, 1.0;
  MarkovMap schur = schur_channel(m2, mask);
  for (int i = 0; i < 50; ++i) {
    for (double alpha : {1.5, 2.0, 3.0, 4.0}) {
      CHECK(check_pbig(schur, random_positive(m2, rng), alpha, 2.0).pass);
    }
  }
  CHECK_THROWS_AS(check_pbig(id, diag2(m2, 1.0, 1.0), 0.5, 1.0), DomainError);
}

TEST_CASE("ando checker") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  AlgebraElement one = AlgebraElement::identity(m2);
  IneqReport r1 = check_ando(one, one, 4.0);
  CHECK(r1.pass);
  CHECK(r1.lhs == doctest::Approx(0.0));

  IneqReport r2 = check_ando(one, AlgebraElement::zero(m2), 4.0);
  CHECK(r2.pass);
  CHECK(r2.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r2.rhs == doctest::Approx(1.0).epsilon(1e-12));

  // Commuting diagonals evaluate per eigenvalue pair:
  // ||diag(1, -1)||_4 = 1 against ||diag(3,-3)||_2^{1/2} = sqrt(3).
  IneqReport r3 = check_ando(diag2(m2, 4.0, 1.0), diag2(m2, 1.0, 4.0), 4.0);
  CHECK(r3.pass);
  CHECK(r3.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r3.rhs == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const double p = 2.05 + 4.0 * rng.uniform();
    CHECK(check_ando(random_positive(m2, rng), random_positive(m2, rng), p).pass);
  }
  CHECK_THROWS_AS(check_ando(one, one, 2.0), DomainError);
  CHECK_THROWS_AS(check_ando(diag2(m2, 1.0, -1.0), one, 3.0), DomainError);
}

TEST_CASE("pto2 ratio checker") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  MarkovMap id = identity_channel(m2);
  Rng rng(9);

  RatioReport r1 = check_pto2(id, random_element(m2, rng), 1.5);
  CHECK(r1.numerator < 1e-12);
  CHECK(r1.ratio == doctest::Approx(0.0));

  // Fixed points keep their Mazur transports fixed.
  Matrix mask(2, 2);
  mask << 1.0, 0.5, 0.5, 1.0;
  MarkovMap schur = schur_channel(m2, mask);
  RatioReport r2 = check_pto2(schur, diag2(m2, 0.7, -1.3), 3.0);
  CHECK(r2.numerator < 1e-10);
  CHECK(r2.ratio == doctest::Approx(0.0));

  double max_ratio = 0.0;
  for (int i = 0; i < 300; ++i) {
    MarkovMap t = random_channel(m2, rng);
    AlgebraElement y = random_element(m2, rng);
    const double p = (i % 2 == 0) ? 1.5 : 3.0;
    RatioReport r = check_pto2(t, y, p);
    CHECK(std::isfinite(r.ratio));
    max_ratio = std::max(max_ratio, r.ratio);
  }
  CHECK(max_ratio < 1e3);
  CHECK(max_ratio > 0.0);

  CHECK_THROWS_AS(check_pto2(id, AlgebraElement::zero(m2), 1.5), DomainError);
}

TEST_CASE("mazur holder ratio checker") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  Rng rng(11);

  AlgebraElement x = random_element(m2, rng);
  RatioReport r1 = check_mazur_holder(x, x, 2.0, 4.0);
  CHECK(r1.ratio == doctest::Approx(0.0));

  // Commuting pair with disjoint supports, (p, q) = (2, 4): exact scalars.
  const double s = std::pow(2.0, 0.5);  // normalizes diag(1,0) in L_2
  AlgebraElement a = diag2(m2, s, 0.0);
  AlgebraElement b = diag2(m2, 0.0, s);
  RatioReport r2 = check_mazur_holder(a, b, 2.0, 4.0);
  // M_{2,4} maps diag(sqrt2,0) to diag(2^{1/4},0): numerator
  // ||diag(2^{1/4},-2^{1/4})||_4 = 2^{1/4}; denominator ||a-b||_2^{1/2} = 2^{1/4}.
  CHECK(r2.ratio == doctest::Approx(1.0).epsilon(1e-12));

  double worst[4] = {0, 0, 0, 0};
  const double pairs[4][2] = {{2.0, 1.5}, {2.0, 4.0}, {1.5, 2.0}, {4.0, 2.0}};
  for (int i = 0; i < 400; ++i) {
    AlgebraElement u = random_element(m2, rng);
    AlgebraElement v = random_element(m2, rng);
    const int k = i % 4;
    RatioReport r = check_mazur_holder(u, v, pairs[k][0], pairs[k][1]);
    CHECK(std::isfinite(r.ratio));
    worst[k] = std::max(worst[k], r.ratio);
  }
  for (double w : worst) CHECK(w < 1e3);

  CHECK_THROWS_AS(check_mazur_holder(AlgebraElement::zero(m2), x, 2.0, 4.0),
                  DomainError);
}
