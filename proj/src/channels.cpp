#include "mgap/channels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <utility>

#include "mgap/structure.hpp"

namespace mgap {

namespace {

double op_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

bool is_commutative(const TracialAlgebra& a) {
  for (const Block& b : a.blocks())
    if (b.dim != 1) return false;
  return true;
}

bool is_single_block(const TracialAlgebra& a) { return a.num_blocks() == 1; }

struct StructuredApply {
  const TracialAlgebra& algebra;
  const AlgebraElement& x;

  AlgebraElement operator()(const KrausList& k) const {
    AlgebraElement acc = AlgebraElement::zero(algebra);
    for (const AlgebraElement& a : k.ops) acc = acc + a * x * a.adjoint();
    return acc;
  }

  AlgebraElement operator()(const SchurMask& s) const {
    std::vector<Matrix> blocks = {s.mask.cwiseProduct(x.block(0))};
    return AlgebraElement(algebra, std::move(blocks));
  }

  AlgebraElement operator()(const StochasticKernel& k) const {
    const int n = algebra.num_blocks();
    std::vector<Matrix> blocks(n);
    for (int i = 0; i < n; ++i) {
      Complex v = 0.0;
      for (int j = 0; j < n; ++j) v += k.kernel(i, j) * x.block(j)(0, 0);
      blocks[i] = Matrix::Constant(1, 1, v);
    }
    return AlgebraElement(algebra, std::move(blocks));
  }

  AlgebraElement operator()(const CondExpectation& e) const;

  AlgebraElement operator()(const Composition& c) const {
    AlgebraElement y = x;
    for (auto it = c.factors.rbegin(); it != c.factors.rend(); ++it) {
      y = (*it)->apply(y);
    }
    return y;
  }

  AlgebraElement operator()(const RawTransfer&) const {
    throw StructuralError("raw transfer has no structured action");
  }
};

AlgebraElement StructuredApply::operator()(const CondExpectation& e) const {
  return e.onto->project(x);
}

Matrix assemble_transfer(const TracialAlgebra& algebra,
                         const Representation& rep) {
  const int n = algebra.coord_dim();
  Matrix m(n, n);
  int col = 0;
  for (int i = 0; i < algebra.num_blocks(); ++i) {
    const int d = algebra.blocks()[i].dim;
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        AlgebraElement basis = from_coords(
            algebra, Vector::Unit(n, coord_index(algebra, i, j, k)));
        m.col(col++) = to_coords(std::visit(StructuredApply{algebra, basis}, rep));
      }
    }
  }
  return m;
}

}  // namespace

std::string ValidationReport::reason() const {
  if (ok()) return "valid";
  std::ostringstream os;
  const char* sep = "";
  if (!unital_ok) {
    os << sep << "not unital (residual " << unital_residual << ")";
    sep = "; ";
  }
  if (!trace_ok) {
    os << sep << "not trace preserving (residual " << trace_residual << ")";
    sep = "; ";
  }
  if (!cp_ok) {
    os << sep << "Choi not PSD (min eigenvalue " << choi_min_eig << ")";
    sep = "; ";
  }
  if (!detail.empty()) os << sep << detail;
  return os.str();
}

ChoiMatrix choi_matrix(const MarkovMap& t) {
  const TracialAlgebra& alg = t.algebra();
  ChoiMatrix out;
  out.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (int i = 0; i < alg.num_blocks(); ++i) {
    const int di = alg.blocks()[i].dim;
    for (int j = 0; j < alg.num_blocks(); ++j) {
      const int dj = alg.blocks()[j].dim;
      // C_{ij} = sum_{kl} e_kl (x) block_i(T(e^{(j)}_kl)), side dj * di
      Matrix c = Matrix::Zero(dj * di, dj * di);
      for (int k = 0; k < dj; ++k) {
        for (int l = 0; l < dj; ++l) {
          const Matrix img =
              t.apply_via_transfer(AlgebraElement::matrix_unit(alg, j, k, l))
                  .block(i);
          c.block(k * di, l * di, di, di) = img;
        }
      }
      out.hermitian_deviation =
          std::max(out.hermitian_deviation, op_norm(Matrix(c - c.adjoint())));
      Eigen::SelfAdjointEigenSolver<Matrix> es(
          Matrix(0.5 * (c + c.adjoint())), Eigen::EigenvaluesOnly);
      out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
      out.pair_blocks.push_back(std::move(c));
    }
  }
  return out;
}

ValidationReport validate_markov(const MarkovMap& t) {
  const TracialAlgebra& alg = t.algebra();
  ValidationReport r;

  AlgebraElement one = AlgebraElement::identity(alg);
  r.unital_residual = (t.apply_via_transfer(one) - one).operator_norm();
  r.unital_ok = r.unital_residual <= tol::kMarkov;

  // tau after T versus tau, over the orthonormal basis.
  const Vector tau = to_coords(one);  // tau(x) = <1, x>
  const Vector tau_after = t.transfer().adjoint() * tau;
  r.trace_residual = (tau_after - tau).cwiseAbs().maxCoeff();
  r.trace_ok = r.trace_residual <= tol::kMarkov;

  ChoiMatrix choi = choi_matrix(t);
  r.choi_min_eig = choi.min_eigenvalue;
  r.cp_ok = choi.min_eigenvalue >= tol::kChoiFloor &&
            choi.hermitian_deviation <= 1e-9;

  // Representation-specific notes for friendlier reasons.
  if (const auto* s = std::get_if<SchurMask>(&t.representation())) {
    const Matrix& m = s->mask;
    double diag_dev = 0.0;
    for (int i = 0; i < m.rows(); ++i) diag_dev = std::max(diag_dev, std::abs(m(i, i) - 1.0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (m + m.adjoint())),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol::kChoiFloor ||
        op_norm(Matrix(m - m.adjoint())) > tol::kMarkov) {
      r.detail = "mask not PSD";
    } else if (diag_dev > tol::kMarkov) {
      r.detail = "mask diagonal is not 1";
    }
  } else if (const auto* k = std::get_if<StochasticKernel>(&t.representation())) {
    if (k->kernel.minCoeff() < -tol::kMarkov) {
      r.detail = "kernel has negative entries";
    } else if (!r.unital_ok) {
      r.detail = "kernel rows do not sum to 1";
    } else if (!r.trace_ok) {
      r.detail = "kernel does not preserve the weights";
    }
  }
  return r;
}

MarkovMap::MarkovMap(TracialAlgebra algebra, Representation rep)
    : algebra_(std::move(algebra)), rep_(std::move(rep)) {
  if (const auto* s = std::get_if<SchurMask>(&rep_)) {
    if (!is_single_block(algebra_))
      throw StructuralError("Schur multiplier needs a single full block");
    if (s->mask.rows() != algebra_.blocks()[0].dim ||
        s->mask.cols() != algebra_.blocks()[0].dim)
      throw StructuralError("Schur mask shape does not match the block");
  }
  if (const auto* k = std::get_if<StochasticKernel>(&rep_)) {
    if (!is_commutative(algebra_))
      throw StructuralError("stochastic kernels need a commutative algebra");
    if (k->kernel.rows() != algebra_.num_blocks() ||
        k->kernel.cols() != algebra_.num_blocks())
      throw StructuralError("kernel shape does not match the algebra");
  }
  if (const auto* kl = std::get_if<KrausList>(&rep_)) {
    if (kl->ops.empty()) throw StructuralError("empty Kraus family");
    for (const AlgebraElement& a : kl->ops) {
      if (a.algebra() != algebra_)
        throw StructuralError("Kraus operator lives in a different algebra");
    }
  }
  if (const auto* c = std::get_if<Composition>(&rep_)) {
    if (c->factors.empty()) throw StructuralError("empty composition");
    for (const auto& f : c->factors) {
      if (f->algebra() != algebra_)
        throw StructuralError("composition factor lives in a different algebra");
    }
  }
  if (std::holds_alternative<RawTransfer>(rep_)) {
    throw StructuralError("raw transfer requires the transfer-matrix constructor");
  }
  transfer_ = assemble_transfer(algebra_, rep_);
  validation_ = validate_markov(*this);
}

MarkovMap::MarkovMap(TracialAlgebra algebra, Matrix transfer)
    : algebra_(std::move(algebra)), rep_(RawTransfer{}), transfer_(std::move(transfer)) {
  if (transfer_.rows() != algebra_.coord_dim() ||
      transfer_.cols() != algebra_.coord_dim()) {
    throw StructuralError("transfer matrix side must equal sum of dim^2");
  }
  validation_ = validate_markov(*this);
}

AlgebraElement MarkovMap::apply(const AlgebraElement& x) const {
  if (x.algebra() != algebra_)
    throw StructuralError("apply: element lives in a different algebra");
  if (std::holds_alternative<RawTransfer>(rep_)) return apply_via_transfer(x);
  return std::visit(StructuredApply{algebra_, x}, rep_);
}

AlgebraElement MarkovMap::apply_via_transfer(const AlgebraElement& x) const {
  if (x.algebra() != algebra_)
    throw StructuralError("apply: element lives in a different algebra");
  return from_coords(algebra_, transfer_ * to_coords(x));
}

MarkovMap identity_channel(const TracialAlgebra& algebra) {
  return MarkovMap(algebra,
                   KrausList{{AlgebraElement::identity(algebra)}});
}

MarkovMap kraus_channel(const TracialAlgebra& algebra,
                        std::vector<AlgebraElement> ops) {
  return MarkovMap(algebra, KrausList{std::move(ops)});
}

MarkovMap schur_channel(const TracialAlgebra& algebra, Matrix mask) {
  return MarkovMap(algebra, SchurMask{std::move(mask)});
}

MarkovMap stochastic_kernel_channel(const TracialAlgebra& algebra,
                                    RealMatrix kernel) {
  return MarkovMap(algebra, StochasticKernel{std::move(kernel)});
}

MarkovMap depolarizing_channel(const TracialAlgebra& algebra, double lambda) {
  if (!is_single_block(algebra))
    throw StructuralError("depolarizing preset needs a single full block");
  if (lambda < 0.0 || lambda > 1.0)
    throw DomainError("depolarizing: lambda must lie in [0, 1]");
  const int n = algebra.blocks()[0].dim;
  // tau(x) 1 = (1/n^2) sum_{ab} W_ab x W_ab* over the Weyl family
  // W_ab = X^a Z^b, so the Kraus family below resolves to
  // (1 - lambda) x + lambda tau(x) 1.
  Matrix shift = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) shift((i + 1) % n, i) = 1.0;
  Matrix clock = Matrix::Zero(n, n);
  const Complex omega = std::exp(Complex(0.0, 2.0 * M_PI / n));
  for (int i = 0; i < n; ++i) clock(i, i) = std::pow(omega, i);

  std::vector<AlgebraElement> ops;
  const double c0 = std::sqrt(1.0 - lambda + lambda / (n * n));
  ops.push_back(AlgebraElement(algebra, {c0 * Matrix::Identity(n, n)}));
  const double cw = std::sqrt(lambda) / n;
  Matrix xa = Matrix::Identity(n, n);
  for (int a = 0; a < n; ++a) {
    Matrix w = xa;
    for (int b = 0; b < n; ++b) {
      if (a != 0 || b != 0) ops.push_back(AlgebraElement(algebra, {cw * w}));
      w = w * clock;
    }
    xa = shift * xa;
  }
  return kraus_channel(algebra, std::move(ops));
}

MarkovMap cyclic_convolution_channel(const TracialAlgebra& algebra,
                                     const std::vector<double>& distribution) {
  if (!is_commutative(algebra))
    throw StructuralError("cyclic convolution needs a commutative algebra");
  const int n = algebra.num_blocks();
  if (static_cast<int>(distribution.size()) != n)
    throw StructuralError("distribution length must match the algebra");
  RealMatrix kernel(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) kernel(i, j) = distribution[((i - j) % n + n) % n];
  return stochastic_kernel_channel(algebra, std::move(kernel));
}

MarkovMap raw_transfer_channel(const TracialAlgebra& algebra, Matrix transfer) {
  return MarkovMap(algebra, std::move(transfer));
}

MarkovMap transpose_channel(const TracialAlgebra& algebra) {
  if (!is_single_block(algebra))
    throw StructuralError("transpose preset needs a single full block");
  const int n = algebra.coord_dim();
  Matrix m(n, n);
  for (int col = 0; col < n; ++col) {
    AlgebraElement basis = from_coords(algebra, Vector::Unit(n, col));
    std::vector<Matrix> tr = {basis.block(0).transpose()};
    m.col(col) = to_coords(AlgebraElement(algebra, std::move(tr)));
  }
  return raw_transfer_channel(algebra, std::move(m));
}

MarkovMap compose(const MarkovMap& s, const MarkovMap& t) {
  if (s.algebra() != t.algebra())
    throw StructuralError("compose: maps act on different algebras");
  Composition c;
  if (const auto* inner = std::get_if<Composition>(&s.representation())) {
    c.factors = inner->factors;
  } else {
    c.factors.push_back(std::make_shared<MarkovMap>(s));
  }
  if (const auto* inner = std::get_if<Composition>(&t.representation())) {
    c.factors.insert(c.factors.end(), inner->factors.begin(),
                     inner->factors.end());
  } else {
    c.factors.push_back(std::make_shared<MarkovMap>(t));
  }
  return MarkovMap(s.algebra(), std::move(c));
}

MarkovMap adjoint_channel(const MarkovMap& t) {
  const TracialAlgebra& alg = t.algebra();
  return std::visit(
      [&](const auto& rep) -> MarkovMap {
        using R = std::decay_t<decltype(rep)>;
        if constexpr (std::is_same_v<R, KrausList>) {
          std::vector<AlgebraElement> ops;
          ops.reserve(rep.ops.size());
          for (const AlgebraElement& a : rep.ops) ops.push_back(a.adjoint());
          return MarkovMap(alg, KrausList{std::move(ops)});
        } else if constexpr (std::is_same_v<R, SchurMask>) {
          return MarkovMap(alg, SchurMask{rep.mask.conjugate()});
        } else if constexpr (std::is_same_v<R, StochasticKernel>) {
          // P'_ij = w_j P_ji / w_i keeps the trace pairing.
          const int n = alg.num_blocks();
          RealMatrix k(n, n);
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
              k(i, j) = alg.blocks()[j].weight * rep.kernel(j, i) /
                        alg.blocks()[i].weight;
          return MarkovMap(alg, StochasticKernel{std::move(k)});
        } else if constexpr (std::is_same_v<R, CondExpectation>) {
          return MarkovMap(alg, CondExpectation{rep.onto});
        } else if constexpr (std::is_same_v<R, Composition>) {
          Composition c;
          for (auto it = rep.factors.rbegin(); it != rep.factors.rend(); ++it) {
            c.factors.push_back(std::make_shared<MarkovMap>(adjoint_channel(**it)));
          }
          return MarkovMap(alg, std::move(c));
        } else {
          return MarkovMap(alg, Matrix(t.transfer().adjoint()));
        }
      },
      t.representation());
}

MarkovMap doubled_channel(const MarkovMap& t) {
  const TracialAlgebra& small = t.algebra();
  TracialAlgebra big = small.doubled();
  const int n = big.coord_dim();
  Matrix m(n, n);
  // Each corner of the doubled blocks is an element of the base algebra;
  // Id tensor T acts cornerwise.
  for (int col = 0; col < n; ++col) {
    AlgebraElement basis = from_coords(big, Vector::Unit(n, col));
    std::vector<Matrix> corners[2][2];
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) corners[r][c].reserve(small.num_blocks());
    for (int i = 0; i < small.num_blocks(); ++i) {
      const int d = small.blocks()[i].dim;
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          corners[r][c].push_back(basis.block(i).block(r * d, c * d, d, d));
    }
    std::vector<Matrix> out_blocks;
    std::vector<AlgebraElement> mapped;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c)
        mapped.push_back(t.apply(AlgebraElement(small, corners[r][c])));
    for (int i = 0; i < small.num_blocks(); ++i) {
      const int d = small.blocks()[i].dim;
      Matrix blk(2 * d, 2 * d);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          blk.block(r * d, c * d, d, d) = mapped[2 * r + c].block(i);
      out_blocks.push_back(std::move(blk));
    }
    m.col(col) = to_coords(AlgebraElement(big, std::move(out_blocks)));
  }
  return MarkovMap(big, std::move(m));
}

}  // namespace mgap
