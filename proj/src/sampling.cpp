#include "mgap/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace mgap {

namespace {

Matrix gaussian_matrix(int rows, int cols, Rng& rng) {
  Matrix g(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) g(r, c) = rng.complex_gaussian();
  return g;
}

Matrix haar_unitary(int n, Rng& rng) {
  Matrix g = gaussian_matrix(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  Vector phases(n);
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    phases(i) = std::abs(d) > 0 ? d / std::abs(d) : Complex(1.0, 0.0);
  }
  return q * phases.asDiagonal();
}

Matrix partial_trace_first(const Matrix& j, int n) {
  // j indexed by (i*n + k); trace over i.
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) out += j.block(i * n, i * n, n, n);
  return out;
}

Matrix partial_trace_second(const Matrix& j, int n) {
  Matrix out = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k) s += j(i * n + k, l * n + k);
      out(i, l) = s;
    }
  return out;
}

Matrix inverse_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.adjoint())));
  Vector d(es.eigenvalues().size());
  for (int i = 0; i < d.size(); ++i) {
    d(i) = Complex(1.0 / std::sqrt(std::max(es.eigenvalues()(i), 1e-14)), 0.0);
  }
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

AlgebraElement random_element(const TracialAlgebra& algebra, Rng& rng) {
  std::vector<Matrix> blocks;
  for (const Block& b : algebra.blocks())
    blocks.push_back(gaussian_matrix(b.dim, b.dim, rng));
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement random_hermitian(const TracialAlgebra& algebra, Rng& rng) {
  AlgebraElement g = random_element(algebra, rng);
  return 0.5 * (g + g.adjoint());
}

AlgebraElement random_positive(const TracialAlgebra& algebra, Rng& rng) {
  AlgebraElement g = random_element(algebra, rng);
  AlgebraElement x = g.adjoint() * g;
  return (1.0 / schatten_norm(x, 2.0)) * x;
}

AlgebraElement random_unitary_element(const TracialAlgebra& algebra, Rng& rng) {
  std::vector<Matrix> blocks;
  for (const Block& b : algebra.blocks()) blocks.push_back(haar_unitary(b.dim, rng));
  return AlgebraElement(algebra, std::move(blocks));
}

AlgebraElement random_normal(const TracialAlgebra& algebra, Rng& rng) {
  std::vector<Matrix> blocks;
  for (const Block& b : algebra.blocks()) {
    Matrix u = haar_unitary(b.dim, rng);
    Vector d(b.dim);
    for (int i = 0; i < b.dim; ++i) {
      const double r = std::sqrt(rng.uniform());
      const double t = 2.0 * M_PI * rng.uniform();
      d(i) = Complex(r * std::cos(t), r * std::sin(t));
    }
    blocks.push_back(u * d.asDiagonal() * u.adjoint());
  }
  return AlgebraElement(algebra, std::move(blocks));
}

std::vector<double> random_probability_vector(int n, Rng& rng) {
  std::vector<double> p(n);
  double sum = 0.0;
  for (double& v : p) {
    v = -std::log(std::max(rng.uniform(), 1e-300));
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

MarkovMap random_mixed_unitary_channel(const TracialAlgebra& algebra,
                                       int branches, Rng& rng) {
  std::vector<double> p = random_probability_vector(branches, rng);
  std::vector<AlgebraElement> ops;
  ops.reserve(branches);
  for (int l = 0; l < branches; ++l) {
    ops.push_back(std::sqrt(p[l]) * random_unitary_element(algebra, rng));
  }
  return kraus_channel(algebra, std::move(ops));
}

MarkovMap random_schur_channel(const TracialAlgebra& algebra, Rng& rng) {
  const int n = algebra.blocks()[0].dim;
  Matrix g = gaussian_matrix(n, n + 2, rng);
  Matrix mask(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mask(i, j) = g.row(i).dot(g.row(j)) / (g.row(i).norm() * g.row(j).norm());
    }
    mask(i, i) = 1.0;
  }
  // Hermitize; rows were built to make this PSD with unit diagonal.
  mask = 0.5 * (mask + Matrix(mask.adjoint()));
  return schur_channel(algebra, std::move(mask));
}

MarkovMap random_doubly_stochastic_channel(const TracialAlgebra& algebra,
                                           Rng& rng) {
  const int n = algebra.num_blocks();
  RealMatrix k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) k(i, j) = rng.uniform(0.05, 1.0);
  for (int round = 0; round < 2000; ++round) {
    for (int i = 0; i < n; ++i) k.row(i) /= k.row(i).sum();
    for (int j = 0; j < n; ++j) k.col(j) /= k.col(j).sum();
    double res = 0.0;
    for (int i = 0; i < n; ++i) res = std::max(res, std::abs(k.row(i).sum() - 1.0));
    if (res < 1e-14) break;
  }
  return stochastic_kernel_channel(algebra, std::move(k));
}

MarkovMap random_unital_channel(const TracialAlgebra& algebra, Rng& rng) {
  const int n = algebra.blocks()[0].dim;
  const int n2 = n * n;
  Matrix g = gaussian_matrix(n2, n2, rng);
  Matrix j = g * g.adjoint();
  j *= static_cast<double>(n) / j.trace().real();

  bool balanced = false;
  for (int round = 0; round < 800; ++round) {
    Matrix m2 = partial_trace_second(j, n);  // trace-preservation marginal
    Matrix x = inverse_sqrt(m2);
    Matrix xi = Matrix::Zero(n2, n2);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        xi.block(a * n, b * n, n, n) = x(a, b) * Matrix::Identity(n, n);
    j = xi * j * xi.adjoint();

    Matrix m1 = partial_trace_first(j, n);  // unitality marginal
    Matrix y = inverse_sqrt(m1);
    Matrix yi = Matrix::Zero(n2, n2);
    for (int a = 0; a < n; ++a) yi.block(a * n, a * n, n, n) = y;
    j = yi * j * yi.adjoint();

    const double res =
        std::max((partial_trace_first(j, n) - Matrix::Identity(n, n)).norm(),
                 (partial_trace_second(j, n) - Matrix::Identity(n, n)).norm());
    if (res < 1e-13) {
      balanced = true;
      break;
    }
  }
  if (!balanced) return random_mixed_unitary_channel(algebra, 3, rng);

  // Kraus operators from the Choi eigenpairs: a[k][i] reads v[i*n + k].
  Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (j + j.adjoint())));
  std::vector<AlgebraElement> ops;
  for (int m = 0; m < n2; ++m) {
    const double lam = es.eigenvalues()(m);
    if (lam < 1e-13) continue;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) a(k, i) = es.eigenvectors()(i * n + k, m);
    ops.push_back(AlgebraElement(algebra, {std::sqrt(lam) * a}));
  }
  return kraus_channel(algebra, std::move(ops));
}

MarkovMap random_channel(const TracialAlgebra& algebra, Rng& rng) {
  const int n = algebra.blocks()[0].dim;
  switch (rng.uniform_int(4)) {
    case 0:
      return random_mixed_unitary_channel(algebra, 2 + rng.uniform_int(3), rng);
    case 1:
      return n >= 2 ? random_schur_channel(algebra, rng)
                    : random_mixed_unitary_channel(algebra, 2, rng);
    case 2:
      return random_unital_channel(algebra, rng);
    default: {
      MarkovMap s = random_mixed_unitary_channel(algebra, 2, rng);
      MarkovMap t = random_unital_channel(algebra, rng);
      return compose(s, t);
    }
  }
}

Subalgebra random_masa(const TracialAlgebra& algebra, Rng& rng) {
  AlgebraElement u = random_unitary_element(algebra, rng);
  std::vector<AlgebraElement> gens;
  for (int i = 0; i < algebra.num_blocks(); ++i) {
    const int d = algebra.blocks()[i].dim;
    Vector diag(d);
    for (int k = 0; k < d; ++k) diag(k) = Complex(k + 1 + 0.3 * rng.uniform(), 0.0);
    Matrix m = diag.asDiagonal();
    std::vector<Matrix> blocks;
    for (int bi = 0; bi < algebra.num_blocks(); ++bi) {
      const int db = algebra.blocks()[bi].dim;
      blocks.push_back(bi == i ? m : Matrix::Zero(db, db));
    }
    gens.push_back(u * AlgebraElement(algebra, std::move(blocks)) * u.adjoint());
  }
  return generate_subalgebra(algebra, gens);
}

}  // namespace mgap
