#include "mgap/structure.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "mgap/rng.hpp"

namespace mgap {

namespace {

// Gram-Schmidt with reorthogonalization; vectors contributing less than the
// rank tolerance are dropped. Deterministic in input order.
Matrix orthonormalize(const TracialAlgebra& algebra,
                      const std::vector<Vector>& candidates) {
  const int n = algebra.coord_dim();
  Matrix q(n, 0);
  for (const Vector& v : candidates) {
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass) {
      if (q.cols() > 0) r -= q * (q.adjoint() * r);
    }
    const double vnorm = v.norm();
    if (r.norm() > 1e-10 * std::max(1.0, vnorm)) {
      q.conservativeResize(Eigen::NoChange, q.cols() + 1);
      q.col(q.cols() - 1) = r / r.norm();
    }
  }
  return q;
}

std::vector<AlgebraElement> columns_to_elements(const TracialAlgebra& algebra,
                                                const Matrix& q) {
  std::vector<AlgebraElement> out;
  out.reserve(q.cols());
  for (int c = 0; c < q.cols(); ++c) out.push_back(from_coords(algebra, q.col(c)));
  return out;
}

// Left/right multiplication by b, as matrices on the coordinate space.
Matrix left_mul_matrix(const AlgebraElement& b) {
  const TracialAlgebra& alg = b.algebra();
  const int n = alg.coord_dim();
  Matrix m(n, n);
  for (int c = 0; c < n; ++c) {
    AlgebraElement e = from_coords(alg, Vector::Unit(n, c));
    m.col(c) = to_coords(b * e);
  }
  return m;
}

Matrix right_mul_matrix(const AlgebraElement& b) {
  const TracialAlgebra& alg = b.algebra();
  const int n = alg.coord_dim();
  Matrix m(n, n);
  for (int c = 0; c < n; ++c) {
    AlgebraElement e = from_coords(alg, Vector::Unit(n, c));
    m.col(c) = to_coords(e * b);
  }
  return m;
}

bool uniform_weights(const TracialAlgebra& a) {
  const double w0 = a.blocks()[0].weight;
  for (const Block& b : a.blocks())
    if (std::abs(b.weight - w0) > 1e-12) return false;
  return true;
}

bool is_commutative_algebra(const TracialAlgebra& a) {
  for (const Block& b : a.blocks())
    if (b.dim != 1) return false;
  return true;
}

// Kuhn's augmenting-path matching over the positive support of R.
bool kuhn_augment(int row, const std::vector<std::vector<int>>& adj,
                  std::vector<int>& match_col, std::vector<char>& used) {
  for (int col : adj[row]) {
    if (used[col]) continue;
    used[col] = 1;
    if (match_col[col] < 0 ||
        kuhn_augment(match_col[col], adj, match_col, used)) {
      match_col[col] = row;
      return true;
    }
  }
  return false;
}

// Greedy Birkhoff decomposition of a doubly stochastic matrix: repeatedly
// extract a permutation supported on the positive entries, scaled by their
// minimum.
std::vector<std::pair<double, std::vector<int>>> birkhoff(RealMatrix r) {
  const int n = static_cast<int>(r.rows());
  std::vector<std::pair<double, std::vector<int>>> parts;
  double total = 0.0;
  const double cut = 1e-12;
  while (total < 1.0 - 1e-12) {
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (r(i, j) > cut) adj[i].push_back(j);
    std::vector<int> match_col(n, -1);
    int matched = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<char> used(n, 0);
      if (kuhn_augment(i, adj, match_col, used)) ++matched;
    }
    if (matched < n) {
      throw UnsupportedError(
          "Birkhoff decomposition failed: kernel is not doubly stochastic");
    }
    std::vector<int> perm(n, -1);  // perm[i] = source column for row i
    for (int j = 0; j < n; ++j) perm[match_col[j]] = j;
    double c = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) c = std::min(c, r(i, perm[i]));
    for (int i = 0; i < n; ++i) r(i, perm[i]) -= c;
    parts.emplace_back(c, std::move(perm));
    total += c;
  }
  return parts;
}

std::optional<UnitaryFamily> unitary_family_of(
    const TracialAlgebra& algebra, const std::vector<AlgebraElement>& kraus) {
  UnitaryFamily fam;
  double wsum = 0.0;
  for (const AlgebraElement& a : kraus) {
    AlgebraElement gram = a.adjoint() * a;
    const double c = gram.trace().real();
    if (!(c > 1e-14)) return std::nullopt;
    AlgebraElement dev = gram - c * AlgebraElement::identity(algebra);
    if (dev.operator_norm() > 1e-10 * std::max(1.0, c)) return std::nullopt;
    AlgebraElement u = (1.0 / std::sqrt(c)) * a;
    if ((u.adjoint() * u - AlgebraElement::identity(algebra)).operator_norm() >
        1e-9) {
      return std::nullopt;
    }
    fam.weights.push_back(c);
    fam.unitaries.push_back(std::move(u));
    wsum += c;
  }
  if (std::abs(wsum - 1.0) > 1e-9) return std::nullopt;
  return fam;
}

TracialAlgebra dilated_algebra_for(const TracialAlgebra& base,
                                   const std::vector<double>& weights) {
  std::vector<Block> blocks;
  for (double p : weights) {
    for (const Block& b : base.blocks()) blocks.push_back(Block{b.dim, b.weight * p});
  }
  return TracialAlgebra(std::move(blocks));
}

std::vector<int> identity_perm(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

DilationCertificate certificate_from_branches(
    const TracialAlgebra& base, std::vector<DilationBranch> branches) {
  std::vector<double> weights;
  weights.reserve(branches.size());
  for (const DilationBranch& b : branches) weights.push_back(b.weight);
  return DilationCertificate{base, dilated_algebra_for(base, weights),
                             std::move(branches)};
}

AlgebraElement apply_branch(const DilationBranch& br, const AlgebraElement& x) {
  const TracialAlgebra& alg = x.algebra();
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (int i = 0; i < x.num_blocks(); ++i) {
    const Matrix& u = br.unitary.block(i);
    blocks.push_back(u * x.block(br.block_perm[i]) * u.adjoint());
  }
  return AlgebraElement(alg, std::move(blocks));
}

// Average of the branches as a base -> base map; must reproduce T.
AlgebraElement apply_branch_average(const std::vector<DilationBranch>& branches,
                                    const AlgebraElement& x) {
  AlgebraElement acc = AlgebraElement::zero(x.algebra());
  for (const DilationBranch& br : branches) {
    acc = acc + br.weight * apply_branch(br, x);
  }
  return acc;
}

double branch_average_mismatch(const std::vector<DilationBranch>& branches,
                               const MarkovMap& t) {
  const TracialAlgebra& alg = t.algebra();
  double worst = 0.0;
  for (int c = 0; c < alg.coord_dim(); ++c) {
    AlgebraElement b = from_coords(alg, Vector::Unit(alg.coord_dim(), c));
    Vector lhs = to_coords(apply_branch_average(branches, b));
    Vector rhs = to_coords(t.apply_via_transfer(b));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

// Minimal projections of an abelian *-subalgebra given by an orthonormal
// coordinate basis. Uses a generic hermitian combination; retries with fresh
// coefficients if eigenvalue clusters collide.
std::optional<std::vector<AlgebraElement>> minimal_projections(
    const TracialAlgebra& alg, const Matrix& comm_basis) {
  const int dim_c = static_cast<int>(comm_basis.cols());
  for (int attempt = 0; attempt < 5; ++attempt) {
    Rng rng(0xC0FFEEULL + attempt);
    AlgebraElement g = AlgebraElement::zero(alg);
    for (int m = 0; m < dim_c; ++m) {
      AlgebraElement f = from_coords(alg, comm_basis.col(m));
      AlgebraElement h = 0.5 * (f + f.adjoint());
      AlgebraElement k = Complex(0.0, 0.5) * (f - f.adjoint());
      g = g + rng.uniform(0.5, 1.5) * h + rng.uniform(0.5, 1.5) * k;
    }
    std::vector<AlgebraElement> projections;
    for (int i = 0; i < alg.num_blocks(); ++i) {
      const int d = alg.blocks()[i].dim;
      Matrix h = 0.5 * (g.block(i) + g.block(i).adjoint());
      Eigen::SelfAdjointEigenSolver<Matrix> es(h);
      const RealVector& lam = es.eigenvalues();
      const double spread = std::max(1.0, lam(d - 1) - lam(0));
      int start = 0;
      for (int k = 1; k <= d; ++k) {
        if (k == d || lam(k) - lam(k - 1) > 1e-6 * spread) {
          Matrix vs = es.eigenvectors().middleCols(start, k - start);
          AlgebraElement q = AlgebraElement::zero(alg);
          std::vector<Matrix> data;
          for (int bi = 0; bi < alg.num_blocks(); ++bi) {
            const int db = alg.blocks()[bi].dim;
            data.push_back(bi == i ? Matrix(vs * vs.adjoint())
                                   : Matrix::Zero(db, db));
          }
          projections.emplace_back(alg, std::move(data));
          start = k;
        }
      }
    }
    if (static_cast<int>(projections.size()) != dim_c) continue;
    // The commutant must be exactly the span of these projections.
    std::vector<Vector> proj_coords;
    for (const AlgebraElement& q : projections) proj_coords.push_back(to_coords(q));
    Matrix qspan = orthonormalize(alg, proj_coords);
    bool ok = qspan.cols() == dim_c;
    for (int m = 0; ok && m < dim_c; ++m) {
      Vector v = comm_basis.col(m);
      ok = (v - qspan * (qspan.adjoint() * v)).norm() <= 1e-8;
    }
    if (ok) return projections;
  }
  return std::nullopt;
}

}  // namespace

Subalgebra::Subalgebra(TracialAlgebra algebra, std::vector<AlgebraElement> basis)
    : algebra_(std::move(algebra)), basis_(std::move(basis)) {
  if (basis_.empty()) throw StructuralError("subalgebra needs a nonempty basis");
  const int n = algebra_.coord_dim();
  coords_.resize(n, static_cast<int>(basis_.size()));
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    if (basis_[k].algebra() != algebra_)
      throw StructuralError("subalgebra basis element lives in a different algebra");
    coords_.col(static_cast<int>(k)) = to_coords(basis_[k]);
  }
  Matrix gram = coords_.adjoint() * coords_;
  if ((gram - Matrix::Identity(dim(), dim())).cwiseAbs().maxCoeff() > tol::kGram) {
    throw StructuralError("subalgebra basis is not orthonormal");
  }
  if (span_residual(AlgebraElement::identity(algebra_)) > tol::kGram) {
    throw StructuralError("subalgebra does not contain the identity");
  }
  for (const AlgebraElement& b : basis_) {
    if (span_residual(b.adjoint()) > tol::kSubalgebra)
      throw StructuralError("subalgebra is not closed under adjoints");
  }
  for (const AlgebraElement& bi : basis_) {
    for (const AlgebraElement& bj : basis_) {
      AlgebraElement prod = bi * bj;
      const double scale = std::max(1.0, to_coords(prod).norm());
      if (span_residual(prod) > tol::kSubalgebra * scale)
        throw StructuralError("subalgebra is not closed under products");
    }
  }
}

AlgebraElement Subalgebra::project(const AlgebraElement& x) const {
  if (x.algebra() != algebra_)
    throw StructuralError("project: element lives in a different algebra");
  return from_coords(algebra_, coords_ * (coords_.adjoint() * to_coords(x)));
}

double Subalgebra::span_residual(const AlgebraElement& x) const {
  Vector v = to_coords(x);
  return (v - coords_ * (coords_.adjoint() * v)).norm();
}

bool Subalgebra::contains(const AlgebraElement& x, double tolerance) const {
  return span_residual(x) <= tolerance;
}

Subalgebra generate_subalgebra(const TracialAlgebra& algebra,
                               const std::vector<AlgebraElement>& generators) {
  std::vector<Vector> seed;
  seed.push_back(to_coords(AlgebraElement::identity(algebra)));
  for (const AlgebraElement& g : generators) {
    if (g.algebra() != algebra)
      throw StructuralError("generator lives in a different algebra");
    seed.push_back(to_coords(g));
  }
  Matrix q = orthonormalize(algebra, seed);
  for (int round = 0; round <= algebra.coord_dim(); ++round) {
    std::vector<AlgebraElement> basis = columns_to_elements(algebra, q);
    std::vector<Vector> candidates;
    for (int c = 0; c < q.cols(); ++c) candidates.push_back(q.col(c));
    for (const AlgebraElement& b : basis) candidates.push_back(to_coords(b.adjoint()));
    for (const AlgebraElement& bi : basis)
      for (const AlgebraElement& bj : basis)
        candidates.push_back(to_coords(bi * bj));
    Matrix grown = orthonormalize(algebra, candidates);
    if (grown.cols() == q.cols()) break;
    q = std::move(grown);
  }
  return Subalgebra(algebra, columns_to_elements(algebra, q));
}

Subalgebra scalar_subalgebra(const TracialAlgebra& algebra) {
  return Subalgebra(algebra, {AlgebraElement::identity(algebra)});
}

Subalgebra full_subalgebra(const TracialAlgebra& algebra) {
  const int n = algebra.coord_dim();
  std::vector<AlgebraElement> basis;
  basis.reserve(n);
  for (int c = 0; c < n; ++c) basis.push_back(from_coords(algebra, Vector::Unit(n, c)));
  return Subalgebra(algebra, std::move(basis));
}

Subalgebra diagonal_subalgebra(const TracialAlgebra& algebra) {
  std::vector<AlgebraElement> basis;
  for (int i = 0; i < algebra.num_blocks(); ++i) {
    const Block& b = algebra.blocks()[i];
    const double scale = std::sqrt(static_cast<double>(b.dim) / b.weight);
    for (int k = 0; k < b.dim; ++k) {
      basis.push_back(scale * AlgebraElement::matrix_unit(algebra, i, k, k));
    }
  }
  return Subalgebra(algebra, std::move(basis));
}

Subalgebra rotated_diagonal_subalgebra(const TracialAlgebra& algebra,
                                       double theta) {
  if (algebra.num_blocks() != 1 || algebra.blocks()[0].dim != 2)
    throw StructuralError("rotated-diagonal preset needs a single M_2 block");
  const double c = std::cos(theta) * std::cos(theta);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  Matrix dir(2, 2);
  dir << c, s, s, -c;
  return Subalgebra(algebra, {AlgebraElement::identity(algebra),
                              AlgebraElement(algebra, {dir})});
}

Subalgebra intersect(const Subalgebra& a, const Subalgebra& b) {
  if (a.algebra() != b.algebra())
    throw StructuralError("intersect: subalgebras of different algebras");
  Eigen::JacobiSVD<Matrix> svd(a.coord_basis().adjoint() * b.coord_basis(),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  std::vector<Vector> kept;
  for (int k = 0; k < sv.size(); ++k) {
    if (sv(k) >= 1.0 - 1e-9) {
      kept.push_back(a.coord_basis() * svd.matrixU().col(k));
    }
  }
  Matrix q = orthonormalize(a.algebra(), kept);
  return Subalgebra(a.algebra(), columns_to_elements(a.algebra(), q));
}

double principal_angle_cosine(const Subalgebra& a, const Subalgebra& b,
                              const Subalgebra& common) {
  const Matrix& qn = common.coord_basis();
  auto deflate = [&](const Matrix& q) {
    std::vector<Vector> cols;
    for (int c = 0; c < q.cols(); ++c) {
      Vector v = q.col(c) - qn * (qn.adjoint() * q.col(c));
      cols.push_back(v);
    }
    return orthonormalize(a.algebra(), cols);
  };
  Matrix qa = deflate(a.coord_basis());
  Matrix qb = deflate(b.coord_basis());
  if (qa.cols() == 0 || qb.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(qa.adjoint() * qb);
  return svd.singularValues()(0);
}

MarkovMap conditional_expectation(const Subalgebra& s) {
  return MarkovMap(s.algebra(),
                   CondExpectation{std::make_shared<Subalgebra>(s)});
}

Subalgebra fixed_point_algebra(const MarkovMap& t) {
  if (!t.is_valid()) {
    throw StructuralError("fixed_point_algebra requires a valid Markov map: " +
                          t.validation().reason());
  }
  const TracialAlgebra& alg = t.algebra();
  const int n = alg.coord_dim();
  Matrix shifted = t.transfer() - Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
  std::vector<AlgebraElement> basis;
  for (int k = 0; k < n; ++k) {
    if (svd.singularValues()(k) <= tol::kFixedSpace) {
      basis.push_back(from_coords(alg, svd.matrixV().col(k)));
    }
  }
  try {
    return Subalgebra(alg, std::move(basis));
  } catch (const StructuralError& e) {
    throw StructuralError(std::string("fixed points not an algebra: ") + e.what());
  }
}

AlgebraElement DilationCertificate::embed(const AlgebraElement& x) const {
  if (x.algebra() != base)
    throw StructuralError("embed: element lives outside the base algebra");
  std::vector<Matrix> blocks;
  blocks.reserve(dilated.num_blocks());
  for (std::size_t l = 0; l < branches.size(); ++l) {
    for (int i = 0; i < base.num_blocks(); ++i) blocks.push_back(x.block(i));
  }
  return AlgebraElement(dilated, std::move(blocks));
}

AlgebraElement DilationCertificate::represent(const AlgebraElement& x) const {
  if (x.algebra() != base)
    throw StructuralError("represent: element lives outside the base algebra");
  std::vector<Matrix> blocks;
  blocks.reserve(dilated.num_blocks());
  for (const DilationBranch& br : branches) {
    AlgebraElement y = apply_branch(br, x);
    for (int i = 0; i < base.num_blocks(); ++i) blocks.push_back(y.block(i));
  }
  return AlgebraElement(dilated, std::move(blocks));
}

AlgebraElement DilationCertificate::expect_onto_base(
    const AlgebraElement& y) const {
  return embed(compress(y));
}

AlgebraElement DilationCertificate::compress(const AlgebraElement& y) const {
  if (y.algebra() != dilated)
    throw StructuralError("compress: element lives outside the dilated algebra");
  AlgebraElement acc = AlgebraElement::zero(base);
  const int nb = base.num_blocks();
  for (std::size_t l = 0; l < branches.size(); ++l) {
    std::vector<Matrix> blocks;
    blocks.reserve(nb);
    for (int i = 0; i < nb; ++i) blocks.push_back(y.block(static_cast<int>(l) * nb + i));
    acc = acc + branches[l].weight * AlgebraElement(base, std::move(blocks));
  }
  return acc;
}

namespace {

std::vector<DilationBranch> branches_for_cond_expectation(
    const MarkovMap& t, const Subalgebra& s) {
  const TracialAlgebra& alg = t.algebra();
  const int n = alg.coord_dim();

  if (s.dim() == n) {
    // E onto the full algebra is the identity map.
    return {DilationBranch{1.0, identity_perm(alg.num_blocks()),
                           AlgebraElement::identity(alg)}};
  }

  if (is_commutative_algebra(alg) && uniform_weights(alg)) {
    // The expectation is itself a doubly stochastic kernel.
    const int m = alg.num_blocks();
    RealMatrix kernel(m, m);
    for (int j = 0; j < m; ++j) {
      AlgebraElement img = s.project(AlgebraElement::matrix_unit(alg, j, 0, 0));
      for (int i = 0; i < m; ++i) kernel(i, j) = img.block(i)(0, 0).real();
    }
    std::vector<DilationBranch> branches;
    for (auto& [c, perm] : birkhoff(kernel)) {
      branches.push_back(
          DilationBranch{c, perm, AlgebraElement::identity(alg)});
    }
    return branches;
  }

  // Commutant of the subalgebra inside the algebra.
  Matrix constraints(n * s.dim(), n);
  for (int k = 0; k < s.dim(); ++k) {
    const AlgebraElement& b = s.basis()[k];
    constraints.middleRows(k * n, n) = left_mul_matrix(b) - right_mul_matrix(b);
  }
  Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = std::max(1e-12, 1e-10 * (sv.size() ? sv(0) : 0.0));
  std::vector<Vector> null_cols;
  for (int k = 0; k < n; ++k) {
    if (k >= sv.size() || sv(k) <= cut) null_cols.push_back(svd.matrixV().col(k));
  }
  Matrix comm = orthonormalize(alg, null_cols);

  bool abelian = true;
  std::vector<AlgebraElement> comm_elems = columns_to_elements(alg, comm);
  for (std::size_t i = 0; i < comm_elems.size() && abelian; ++i) {
    for (std::size_t j = i + 1; j < comm_elems.size() && abelian; ++j) {
      AlgebraElement lhs = comm_elems[i] * comm_elems[j];
      AlgebraElement rhs = comm_elems[j] * comm_elems[i];
      if ((lhs - rhs).operator_norm() > 1e-9) abelian = false;
    }
  }

  if (abelian) {
    auto projections = minimal_projections(alg, comm);
    if (projections) {
      const int k = static_cast<int>(projections->size());
      const Complex omega = std::exp(Complex(0.0, 2.0 * M_PI / k));
      std::vector<DilationBranch> branches;
      for (int j = 0; j < k; ++j) {
        AlgebraElement u = AlgebraElement::zero(alg);
        for (int tdx = 0; tdx < k; ++tdx) {
          u = u + std::pow(omega, j * tdx) * (*projections)[tdx];
        }
        branches.push_back(
            DilationBranch{1.0 / k, identity_perm(alg.num_blocks()), u});
      }
      if (branch_average_mismatch(branches, t) <= 1e-9) return branches;
    }
  }

  if (s.dim() == 1 && alg.num_blocks() == 1) {
    // E onto the scalars of a full block: Weyl averaging.
    MarkovMap weyl = depolarizing_channel(alg, 1.0);
    auto fam = unitary_family_of(
        alg, std::get<KrausList>(weyl.representation()).ops);
    if (fam) {
      std::vector<DilationBranch> branches;
      for (std::size_t l = 0; l < fam->weights.size(); ++l) {
        branches.push_back(DilationBranch{fam->weights[l],
                                          identity_perm(alg.num_blocks()),
                                          fam->unitaries[l]});
      }
      if (branch_average_mismatch(branches, t) <= 1e-9) return branches;
    }
  }

  throw UnsupportedError(
      "no averaging family found for this conditional expectation");
}

}  // namespace

DilationCertificate build_dilation(const MarkovMap& t) {
  if (!t.is_valid()) {
    throw StructuralError("build_dilation requires a valid Markov map: " +
                          t.validation().reason());
  }
  const TracialAlgebra& alg = t.algebra();

  std::vector<DilationBranch> branches;
  if (const auto* kl = std::get_if<KrausList>(&t.representation())) {
    auto fam = unitary_family_of(alg, kl->ops);
    if (!fam) {
      throw UnsupportedError(
          "Kraus family is not a weighted family of unitaries");
    }
    for (std::size_t l = 0; l < fam->weights.size(); ++l) {
      branches.push_back(DilationBranch{
          fam->weights[l], identity_perm(alg.num_blocks()), fam->unitaries[l]});
    }
  } else if (const auto* sk = std::get_if<StochasticKernel>(&t.representation())) {
    if (!uniform_weights(alg)) {
      throw UnsupportedError(
          "kernel dilations are built only over uniform weights");
    }
    for (auto& [c, perm] : birkhoff(sk->kernel)) {
      branches.push_back(DilationBranch{c, perm, AlgebraElement::identity(alg)});
    }
  } else if (const auto* ce = std::get_if<CondExpectation>(&t.representation())) {
    branches = branches_for_cond_expectation(t, *ce->onto);
  } else {
    throw UnsupportedError(
        "no dilation construction for this representation class");
  }

  const double mismatch = branch_average_mismatch(branches, t);
  if (mismatch > 1e-9) {
    throw UnsupportedError("constructed branches do not reproduce the map");
  }
  return certificate_from_branches(alg, std::move(branches));
}

FactorizationReport verify_factorization(const DilationCertificate& cert,
                                         const MarkovMap& t) {
  if (t.algebra() != cert.base)
    throw StructuralError("verify_factorization: algebra mismatch");
  FactorizationReport r;
  const TracialAlgebra& alg = cert.base;
  const int n = alg.coord_dim();
  std::vector<AlgebraElement> basis;
  basis.reserve(n);
  for (int c = 0; c < n; ++c) basis.push_back(from_coords(alg, Vector::Unit(n, c)));

  for (const AlgebraElement& b : basis) {
    AlgebraElement pib = cert.represent(b);
    r.action_residual = std::max(
        r.action_residual,
        schatten_norm(t.apply(b) - cert.compress(pib), 2.0));
    r.trace_residual =
        std::max(r.trace_residual, std::abs(b.trace() - pib.trace()));
    r.adjoint_residual = std::max(
        r.adjoint_residual,
        schatten_norm(cert.represent(b.adjoint()) - pib.adjoint(), 2.0));
    AlgebraElement ib = cert.embed(b);
    r.embed_residual = std::max(
        r.embed_residual, schatten_norm(cert.expect_onto_base(ib) - ib, 2.0));
  }
  for (const AlgebraElement& bi : basis) {
    AlgebraElement pbi = cert.represent(bi);
    for (const AlgebraElement& bj : basis) {
      AlgebraElement lhs = cert.represent(bi * bj);
      AlgebraElement rhs = pbi * cert.represent(bj);
      r.hom_residual = std::max(r.hom_residual, schatten_norm(lhs - rhs, 2.0));
    }
  }
  r.pass = r.action_residual <= tol::kSubalgebra &&
           r.trace_residual <= tol::kSubalgebra &&
           r.hom_residual <= tol::kSubalgebra &&
           r.adjoint_residual <= tol::kSubalgebra &&
           r.embed_residual <= tol::kSubalgebra;
  return r;
}

}  // namespace mgap
