#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>

#include "mgap/channels.hpp"
#include "mgap/sampling.hpp"
#include "mgap/structure.hpp"

using namespace mgap;

namespace {

double dist2(const AlgebraElement& a, const AlgebraElement& b) {
  return schatten_norm(a - b, 2.0);
}

double transfer_distance(const MarkovMap& s, const MarkovMap& t) {
  return (s.transfer() - t.transfer()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("depolarizing channel is Markov and acts as expected") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  MarkovMap t = depolarizing_channel(m2, 0.5);
  CHECK(t.is_valid());
  CHECK(t.validation().unital_residual < 1e-12);
  CHECK(t.validation().trace_residual < 1e-12);
  CHECK(t.validation().choi_min_eig > -1e-12);

  // Direct oracle on a basis: T(x) = (1 - lambda) x + lambda tau(x) 1.
  Rng rng(2);
  AlgebraElement one = AlgebraElement::identity(m2);
  for (int i = 0; i < 10; ++i) {
    AlgebraElement x = random_element(m2, rng);
    AlgebraElement expect = 0.5 * x + Complex(0.5) * x.trace() * one;
    CHECK(dist2(t.apply(x), expect) < 1e-12);
  }

  // Traceless inputs contract by exactly 1 - lambda.
  AlgebraElement sz = AlgebraElement::matrix_unit(m2, 0, 0, 0) -
                      AlgebraElement::matrix_unit(m2, 0, 1, 1);
  CHECK(dist2(t.apply(sz), 0.5 * sz) < 1e-13);
}

TEST_CASE("transpose map fails complete positivity with Choi eigenvalue -1") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  MarkovMap t = transpose_channel(m2);
  CHECK_FALSE(t.is_valid());
  CHECK(t.validation().unital_ok);
  CHECK(t.validation().trace_ok);
  CHECK_FALSE(t.validation().cp_ok);
  CHECK(t.validation().choi_min_eig == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(t.validation().reason().find("Choi not PSD") != std::string::npos);
}

TEST_CASE("schur multipliers") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  Matrix mask(2, 2);
  mask << 1.0, 0.3, 0.3, 1.0;
  MarkovMap t = schur_channel(m2, mask);
  CHECK(t.is_valid());

  AlgebraElement e12 = AlgebraElement::matrix_unit(m2, 0, 0, 1);
  CHECK(dist2(t.apply(e12), 0.3 * e12) < 1e-14);

  Matrix bad(2, 2);
  bad << 1.0, 1.5, 1.5, 1.0;
  MarkovMap tb = schur_channel(m2, bad);
  CHECK_FALSE(tb.is_valid());
  CHECK(tb.validation().reason().find("mask not PSD") != std::string::npos);
}

TEST_CASE("stochastic kernels") {
  TracialAlgebra two = TracialAlgebra::commutative({0.5, 0.5});
  RealMatrix kernel(2, 2);
  kernel << 0.75, 0.25, 0.25, 0.75;
  MarkovMap t = stochastic_kernel_channel(two, kernel);
  CHECK(t.is_valid());

  AlgebraElement x(two, {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -1.0)});
  AlgebraElement expect(two,
                        {Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, -0.5)});
  CHECK(dist2(t.apply(x), expect) < 1e-14);

  // Weight preservation failure for non-uniform weights.
  TracialAlgebra skew = TracialAlgebra::commutative({0.9, 0.1});
  MarkovMap ts = stochastic_kernel_channel(skew, kernel);
  CHECK_FALSE(ts.is_valid());
  CHECK(ts.validation().reason().find("weights") != std::string::npos);
}

TEST_CASE("cyclic convolution kernels have DFT eigenvalues") {
  const int n = 5;
  TracialAlgebra cyc = TracialAlgebra::commutative(std::vector<double>(n, 1.0 / n));
  std::vector<double> mu = {0.4, 0.3, 0.1, 0.1, 0.1};
  MarkovMap t = cyclic_convolution_channel(cyc, mu);
  CHECK(t.is_valid());

  Eigen::ComplexEigenSolver<Matrix> es(t.transfer());
  std::vector<double> got;
  for (int i = 0; i < n; ++i) got.push_back(std::abs(es.eigenvalues()(i)));
  std::sort(got.begin(), got.end());

  std::vector<double> expect;
  for (int g = 0; g < n; ++g) {
    Complex c = 0.0;
    for (int k = 0; k < n; ++k) {
      c += mu[k] * std::exp(Complex(0.0, -2.0 * M_PI * g * k / n));
    }
    expect.push_back(std::abs(c));
  }
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < n; ++i) {
    CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-10));
  }
}

TEST_CASE("kraus family violating unitality is flagged") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  Matrix a(2, 2);
  a << 1.0, 0.0, 0.0, 0.5;
  MarkovMap t = kraus_channel(m2, {AlgebraElement(m2, {a})});
  CHECK_FALSE(t.is_valid());
  CHECK_FALSE(t.validation().unital_ok);
}

TEST_CASE("identity validates with zero residuals") {
  TracialAlgebra m3 = TracialAlgebra::full_matrix(3);
  MarkovMap id = identity_channel(m3);
  CHECK(id.validation().unital_residual == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(id.validation().trace_residual == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(id.validation().choi_min_eig >= -1e-13);
}

TEST_CASE("composition") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  Rng rng(9);
  MarkovMap t = random_channel(m2, rng);
  MarkovMap id = identity_channel(m2);
  CHECK(transfer_distance(compose(id, t), t) < 1e-13);

  // Nested conditional expectations collapse to the smaller one.
  MarkovMap e_diag = conditional_expectation(diagonal_subalgebra(m2));
  MarkovMap e_scalar = conditional_expectation(scalar_subalgebra(m2));
  MarkovMap nested = compose(e_diag, e_scalar);
  CHECK(transfer_distance(nested, e_scalar) < 1e-13);
  CHECK((nested.transfer() - e_diag.transfer() * e_scalar.transfer()).norm() <
        1e-13);

  // E_A E_B for two distinct maximal abelian subalgebras is Markov with
  // scalar fixed points.
  MarkovMap e_rot =
      conditional_expectation(rotated_diagonal_subalgebra(m2, M_PI / 4.0));
  MarkovMap prod = compose(e_diag, e_rot);
  CHECK(prod.is_valid());
  Subalgebra fixed = fixed_point_algebra(prod);
  CHECK(fixed.dim() == 1);
}

TEST_CASE("adjoints") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  MarkovMap dep = depolarizing_channel(m2, 0.3);
  CHECK(transfer_distance(adjoint_channel(dep), dep) < 1e-12);

  Matrix mask(2, 2);
  mask << Complex(1.0, 0.0), Complex(0.2, 0.4), Complex(0.2, -0.4),
      Complex(1.0, 0.0);
  MarkovMap schur = schur_channel(m2, mask);
  MarkovMap schur_adj = adjoint_channel(schur);
  const auto* rep = std::get_if<SchurMask>(&schur_adj.representation());
  REQUIRE(rep != nullptr);
  CHECK((rep->mask - mask.conjugate()).norm() < 1e-14);

  TracialAlgebra three = TracialAlgebra::commutative({1.0 / 3, 1.0 / 3, 1.0 / 3});
  Rng rng(15);
  MarkovMap kernel = random_doubly_stochastic_channel(three, rng);
  MarkovMap kernel_adj = adjoint_channel(kernel);
  const auto* krep = std::get_if<StochasticKernel>(&kernel_adj.representation());
  REQUIRE(krep != nullptr);
  const auto* orig = std::get_if<StochasticKernel>(&kernel.representation());
  CHECK((krep->kernel - orig->kernel.transpose()).norm() < 1e-12);

  // Pairing identity and involution on random channels.
  for (int i = 0; i < 10; ++i) {
    MarkovMap t = random_channel(m2, rng);
    MarkovMap ta = adjoint_channel(t);
    CHECK((ta.transfer() - t.transfer().adjoint()).norm() < 1e-12);
    CHECK(transfer_distance(adjoint_channel(ta), t) < 1e-12);
    CHECK(ta.is_valid());
    AlgebraElement x = random_element(m2, rng);
    AlgebraElement y = random_element(m2, rng);
    CHECK(std::abs(inner_product(ta.apply(x), y) -
                   inner_product(x, t.apply(y))) < 1e-11);
  }
}

TEST_CASE("contractivity on every L_p") {
  TracialAlgebra m3 = TracialAlgebra::full_matrix(3);
  Rng rng(23);
  const double inf = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 12; ++i) {
    MarkovMap t = random_channel(m3, rng);
    REQUIRE(t.is_valid());
    for (int j = 0; j < 6; ++j) {
      AlgebraElement x = random_element(m3, rng);
      for (double p : {1.0, 1.5, 2.0, 3.0, 4.0, inf}) {
        CHECK(schatten_norm(t.apply(x), p) <= schatten_norm(x, p) + 1e-9);
      }
    }
  }
}

TEST_CASE("normal elements: ||T(y)||_q <= ||T(|y|)||_q") {
  TracialAlgebra m3 = TracialAlgebra::full_matrix(3);
  Rng rng(27);
  for (int i = 0; i < 40; ++i) {
    MarkovMap t = random_channel(m3, rng);
    AlgebraElement y = random_normal(m3, rng);
    AlgebraElement ay = abs_of(y);
    for (double q : {1.0, 2.0, 3.0}) {
      CHECK(schatten_norm(t.apply(y), q) <=
            schatten_norm(t.apply(ay), q) + 1e-9);
    }
  }
}

TEST_CASE("structured action agrees with the cached transfer") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  TracialAlgebra comm = TracialAlgebra::commutative({0.25, 0.25, 0.25, 0.25});
  Rng rng(33);
  for (int i = 0; i < 10; ++i) {
    MarkovMap t = random_channel(m2, rng);
    AlgebraElement x = random_element(m2, rng);
    CHECK(dist2(t.apply(x), t.apply_via_transfer(x)) < 1e-12);

    MarkovMap k = random_doubly_stochastic_channel(comm, rng);
    AlgebraElement y = random_element(comm, rng);
    CHECK(dist2(k.apply(y), k.apply_via_transfer(y)) < 1e-12);
  }
}

TEST_CASE("doubling a channel keeps it Markov and acts cornerwise") {
  TracialAlgebra m2 = TracialAlgebra::full_matrix(2);
  Rng rng(41);
  MarkovMap t = random_channel(m2, rng);
  MarkovMap big = doubled_channel(t);
  CHECK(big.is_valid());
  CHECK(big.algebra().blocks()[0].dim == 4);

  AlgebraElement x = random_element(m2, rng);
  AlgebraElement corner = embed_2x2(x);
  AlgebraElement image = big.apply(corner);
  AlgebraElement expect = embed_2x2(t.apply(x));
  CHECK(dist2(image, expect) < 1e-12);
}
