#include <doctest.h>

#include <cmath>

#include "mgap/algebra.hpp"
#include "mgap/rng.hpp"
#include "mgap/sampling.hpp"

using namespace mgap;

namespace {

AlgebraElement diag2(const TracialAlgebra& alg, Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return AlgebraElement(alg, {m});
}

// Independent oracle: p-norm of a diagonal element from its eigenvalues.
double diag_norm_oracle(const std::vector<double>& eigs,
                        const std::vector<double>& weights, double p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < eigs.size(); ++i)
    acc += weights[i] * std::pow(std::abs(eigs[i]), p);
  return std::pow(acc, 1.0 / p);
}

double dist2(const AlgebraElement& a, const AlgebraElement& b) {
  return schatten_norm(a - b, 2.0);
}

}  // namespace

TEST_CASE("tracial algebra invariants") {
  CHECK_THROWS_AS(TracialAlgebra({{2, 0.5}, {2, 0.6}}), StructuralError);
  CHECK_THROWS_AS(TracialAlgebra({{0, 1.0}}), StructuralError);
  CHECK_THROWS_AS(TracialAlgebra({{2, -1.0}, {2, 2.0}}), StructuralError);

  TracialAlgebra alg({{2, 0.25}, {3, 0.75}});
  CHECK(alg.total_dim() == 5);
  CHECK(alg.coord_dim() == 13);
  CHECK(AlgebraElement::identity(alg).trace().real() == doctest::Approx(1.0));
}

TEST_CASE("inner product") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  AlgebraElement one = AlgebraElement::identity(m2);
  CHECK(inner_product(one, one).real() == doctest::Approx(1.0).epsilon(1e-14));

  AlgebraElement sz = diag2(m2, 1.0, -1.0);
  CHECK(inner_product(sz, sz).real() == doctest::Approx(1.0).epsilon(1e-14));

  // Weighted-trace evaluation: (3*1 + 4*2) / 2.
  AlgebraElement a = diag2(m2, 3.0, 4.0);
  AlgebraElement b = diag2(m2, 1.0, 2.0);
  CHECK(inner_product(a, b).real() == doctest::Approx(5.5).epsilon(1e-14));

  // Conjugate symmetry and positivity on random elements.
  Rng rng(7);
  for (int i = 0; i < 30; ++i) {
    AlgebraElement x = random_element(m2, rng);
    AlgebraElement y = random_element(m2, rng);
    CHECK(std::abs(inner_product(x, y) - std::conj(inner_product(y, x))) < 1e-12);
    CHECK(inner_product(x, x).real() > 0.0);
    CHECK(std::abs(inner_product(x, x).imag()) < 1e-12);
  }

  TracialAlgebra m3 = TracialAlgebra::full_matrix(3);
  CHECK_THROWS_AS(
      inner_product(AlgebraElement::identity(m2), AlgebraElement::identity(m3)),
      StructuralError);
}

TEST_CASE("schatten norms") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  AlgebraElement one = AlgebraElement::identity(m2);
  for (double p : {1.0, 1.5, 2.0, 3.0, 17.0}) {
    CHECK(schatten_norm(one, p) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(schatten_norm(one, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.0));

  AlgebraElement sz = diag2(m2, 1.0, -1.0);
  for (double p : {1.0, 2.0, 4.0}) {
    CHECK(schatten_norm(sz, p) == doctest::Approx(1.0).epsilon(1e-13));
  }

  AlgebraElement x = diag2(m2, 3.0, 4.0);
  const double expected = diag_norm_oracle({3.0, 4.0}, {0.5, 0.5}, 2.0);
  CHECK(expected == doctest::Approx(3.5355339059327378));
  CHECK(schatten_norm(x, 2.0) == doctest::Approx(expected).epsilon(1e-14));

  CHECK_THROWS_AS(schatten_norm(x, 0.5), DomainError);

  // Triangle inequality and homogeneity, random sample.
  Rng rng(11);
  for (int i = 0; i < 25; ++i) {
    AlgebraElement a = random_element(m2, rng);
    AlgebraElement b = random_element(m2, rng);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      CHECK(schatten_norm(a + b, p) <=
            schatten_norm(a, p) + schatten_norm(b, p) + 1e-11);
      CHECK(schatten_norm(Complex(0.0, 2.0) * a, p) ==
            doctest::Approx(2.0 * schatten_norm(a, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("norm interpolation monotonicity in a probability space") {
  TracialAlgebra alg({{2, 0.5}, {1, 0.25}, {1, 0.25}});
  Rng rng(21);
  const double ps[] = {1.0, 1.5, 2.0, 3.0, 4.0, 8.0};
  for (int i = 0; i < 40; ++i) {
    AlgebraElement x = random_element(alg, rng);
    double prev = 0.0;
    for (double p : ps) {
      const double cur = schatten_norm(x, p);
      CHECK(cur >= prev - 1e-11);
      prev = cur;
    }
    CHECK(x.operator_norm() >= prev - 1e-11);
  }
}

TEST_CASE("signed power") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  AlgebraElement one = AlgebraElement::identity(m2);
  CHECK(dist2(signed_power(one, 7.0), one) < 1e-13);

  AlgebraElement x = diag2(m2, 4.0, -9.0);
  CHECK(dist2(signed_power(x, 0.5), diag2(m2, 2.0, -3.0)) < 1e-12);

  AlgebraElement y = diag2(m2, 4.0, 0.0);
  CHECK(dist2(signed_power(y, 2.0), diag2(m2, 16.0, 0.0)) < 1e-12);

  Matrix off(2, 2);
  off << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(signed_power(AlgebraElement(m2, {off}), 2.0), DomainError);

  // Eigenvectors preserved: conjugate a diagonal by a unitary.
  Rng rng(3);
  AlgebraElement u = random_unitary_element(m2, rng);
  AlgebraElement d = diag2(m2, 2.0, -5.0);
  AlgebraElement conj = u * d * u.adjoint();
  AlgebraElement expect = u * diag2(m2, std::sqrt(2.0), -std::sqrt(5.0)) * u.adjoint();
  CHECK(dist2(signed_power(conj, 0.5), expect) < 1e-10);
}

TEST_CASE("positive and negative parts split disjointly") {
  TracialAlgebra alg({{2, 0.5}, {2, 0.5}});
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    AlgebraElement x = random_hermitian(alg, rng);
    AlgebraElement xp = positive_part(x);
    AlgebraElement xm = negative_part(x);
    CHECK(dist2(xp - xm, x) < 1e-12);
    CHECK(schatten_norm(xp * xm, 2.0) < 1e-12);  // orthogonal supports
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double whole = std::pow(schatten_norm(x, p), p);
      const double split = std::pow(schatten_norm(xp, p), p) +
                           std::pow(schatten_norm(xm, p), p);
      CHECK(whole == doctest::Approx(split).epsilon(1e-12));
    }
  }
  // ||a - b||_p^p <= ||a||_p^p + ||b||_p^p for positive a, b.
  for (int i = 0; i < 30; ++i) {
    AlgebraElement a = random_positive(alg, rng);
    AlgebraElement b = random_positive(alg, rng);
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      CHECK(std::pow(schatten_norm(a - b, p), p) <=
            std::pow(schatten_norm(a, p), p) +
                std::pow(schatten_norm(b, p), p) + 1e-10);
    }
  }
}

TEST_CASE("mazur map") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  AlgebraElement one = AlgebraElement::identity(m2);
  CHECK(dist2(mazur_map(one, 3.0, 1.5), one) < 1e-13);

  CHECK(dist2(mazur_map(diag2(m2, 3.0, 4.0), 2.0, 1.0), diag2(m2, 9.0, 16.0)) <
        1e-11);
  CHECK(dist2(mazur_map(diag2(m2, 1.0, -1.0), 2.0, 4.0), diag2(m2, 1.0, -1.0)) <
        1e-12);

  TracialAlgebra mixed({{2, 0.7}, {1, 0.3}});
  Rng rng(13);
  const double grid[] = {1.0, 1.5, 2.0, 3.0, 4.0};
  for (int i = 0; i < 20; ++i) {
    AlgebraElement x = random_element(mixed, rng);
    for (double p : grid) {
      for (double q : grid) {
        // Norm transport identity.
        const double lhs = schatten_norm(mazur_map(x, p, q), q);
        const double rhs = std::pow(schatten_norm(x, p), p / q);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        // Round trip on full-rank elements (Gaussian draws are full rank).
        CHECK(dist2(mazur_map(mazur_map(x, p, q), q, p), x) < 1e-8);
      }
    }
  }
  CHECK_THROWS_AS(mazur_map(one, 0.0, 2.0), DomainError);
}

TEST_CASE("duality map") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  Rng rng(17);

  // A unitary is its own norming element.
  AlgebraElement u = random_unitary_element(m2, rng);
  CHECK(dist2(duality_map(u, 3.0), u) < 1e-12);

  // Hilbert-space case.
  AlgebraElement x = random_element(m2, rng);
  CHECK(dist2(duality_map(x, 2.0), (1.0 / schatten_norm(x, 2.0)) * x) < 1e-12);

  // J_3(diag(1,2)) = diag(1,4) / ||diag(1,2)||_3^2, then both postconditions.
  AlgebraElement d = diag2(m2, 1.0, 2.0);
  const double n3 = std::pow((1.0 + 8.0) / 2.0, 1.0 / 3.0);
  CHECK(dist2(duality_map(d, 3.0), (1.0 / (n3 * n3)) * diag2(m2, 1.0, 4.0)) <
        1e-12);

  TracialAlgebra mixed({{2, 0.5}, {2, 0.5}});
  for (int i = 0; i < 25; ++i) {
    AlgebraElement y = random_element(mixed, rng);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
      AlgebraElement j = duality_map(y, p);
      const double pprime = p / (p - 1.0);
      CHECK(schatten_norm(j, pprime) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(inner_product(j, y).real() ==
            doctest::Approx(schatten_norm(y, p)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(duality_map(AlgebraElement::zero(m2), 2.0), DomainError);
}

TEST_CASE("corner embedding") {
  TracialAlgebra m1 = TracialAlgebra::full_matrix(1);
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);

  CHECK(schatten_norm(embed_2x2(AlgebraElement::zero(m2)), 2.0) == 0.0);

  // Scalar 1 embeds to the symmetric flip with norm 1 at every p.
  AlgebraElement flipped = embed_2x2(AlgebraElement::identity(m1));
  CHECK(flipped.is_hermitian());
  for (double p : {1.0, 2.0, 4.0}) {
    CHECK(schatten_norm(flipped, p) == doctest::Approx(1.0).epsilon(1e-13));
  }

  AlgebraElement e12 = AlgebraElement::matrix_unit(m2, 0, 0, 1);
  CHECK(schatten_norm(embed_2x2(e12), 4.0) ==
        doctest::Approx(schatten_norm(e12, 4.0)).epsilon(1e-14));

  TracialAlgebra mixed({{2, 0.5}, {1, 0.5}});
  Rng rng(29);
  for (int i = 0; i < 20; ++i) {
    AlgebraElement x = random_element(mixed, rng);
    AlgebraElement big = embed_2x2(x);
    CHECK(big.is_hermitian(1e-12));
    for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
      CHECK(schatten_norm(big, p) ==
            doctest::Approx(schatten_norm(x, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("coordinates round trip and isometry") {
  TracialAlgebra alg({{2, 0.3}, {3, 0.5}, {1, 0.2}});
  Rng rng(31);
  for (int i = 0; i < 20; ++i) {
    AlgebraElement x = random_element(alg, rng);
    Vector v = to_coords(x);
    CHECK(v.norm() == doctest::Approx(schatten_norm(x, 2.0)).epsilon(1e-12));
    CHECK(dist2(from_coords(alg, v), x) < 1e-12);
  }
}
