#include "mgap/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <utility>

namespace mgap {

namespace {

constexpr double kWeightSumTol = 1e-12;

void require_same_algebra(const AlgebraElement& a, const AlgebraElement& b,
                          const char* op) {
  if (a.algebra() != b.algebra()) {
    throw StructuralError(std::string(op) + ": elements live in different algebras");
  }
}

double largest_singular_value(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

// Per-block SVD of an element plus the global largest singular value.
struct SvdData {
  std::vector<Eigen::JacobiSVD<Matrix>> svd;
  double sigma_max = 0.0;
};

SvdData svd_of(const AlgebraElement& x) {
  SvdData out;
  out.svd.reserve(x.num_blocks());
  for (int i = 0; i < x.num_blocks(); ++i) {
    out.svd.emplace_back(x.block(i), Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (x.block(i).rows() > 0) {
      out.sigma_max = std::max(out.sigma_max, out.svd.back().singularValues()(0));
    }
  }
  return out;
}

// U f(sigma) V* blockwise. f receives singular values already gated against
// the global rank cutoff (gated ones arrive as exactly 0).
template <typename F>
AlgebraElement map_singular_values(const AlgebraElement& x, const SvdData& data,
                                   F&& f) {
  const double cut = tol::kRankCut * data.sigma_max;
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (int i = 0; i < x.num_blocks(); ++i) {
    const auto& svd = data.svd[i];
    const auto& sv = svd.singularValues();
    Vector d(sv.size());
    for (int k = 0; k < sv.size(); ++k) {
      const double s = sv(k) > cut ? sv(k) : 0.0;
      d(k) = (s > 0.0) ? Complex(f(s), 0.0) : Complex(0.0, 0.0);
    }
    blocks.push_back(svd.matrixU() * d.asDiagonal() * svd.matrixV().adjoint());
  }
  return AlgebraElement(x.algebra(), std::move(blocks));
}

// Q f(lambda) Q* blockwise for self-adjoint x (the hermitian part is used).
template <typename F>
AlgebraElement map_eigenvalues(const AlgebraElement& x, F&& f) {
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (int i = 0; i < x.num_blocks(); ++i) {
    Matrix h = 0.5 * (x.block(i) + x.block(i).adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Vector d(es.eigenvalues().size());
    for (int k = 0; k < d.size(); ++k) d(k) = Complex(f(es.eigenvalues()(k)), 0.0);
    blocks.push_back(es.eigenvectors() * d.asDiagonal() *
                     es.eigenvectors().adjoint());
  }
  return AlgebraElement(x.algebra(), std::move(blocks));
}

}  // namespace

TracialAlgebra::TracialAlgebra(std::vector<Block> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw StructuralError("algebra needs at least one block");
  double wsum = 0.0;
  for (const Block& b : blocks_) {
    if (b.dim < 1) throw StructuralError("block dimension must be >= 1");
    if (!(b.weight > 0.0)) throw StructuralError("block weight must be > 0");
    wsum += b.weight;
    total_dim_ += b.dim;
    coord_dim_ += b.dim * b.dim;
  }
  if (std::abs(wsum - 1.0) > kWeightSumTol) {
    throw StructuralError("block weights must sum to 1");
  }
}

TracialAlgebra TracialAlgebra::full_matrix(int n) {
  return TracialAlgebra({Block{n, 1.0}});
}

TracialAlgebra TracialAlgebra::commutative(const std::vector<double>& weights) {
  std::vector<Block> blocks;
  blocks.reserve(weights.size());
  for (double w : weights) blocks.push_back(Block{1, w});
  return TracialAlgebra(std::move(blocks));
}

TracialAlgebra TracialAlgebra::doubled() const {
  std::vector<Block> blocks = blocks_;
  for (Block& b : blocks) b.dim *= 2;
  return TracialAlgebra(std::move(blocks));
}

bool TracialAlgebra::operator==(const TracialAlgebra& other) const {
  if (blocks_.size() != other.blocks_.size()) return false;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].dim != other.blocks_[i].dim) return false;
    if (blocks_[i].weight != other.blocks_[i].weight) return false;
  }
  return true;
}

AlgebraElement::AlgebraElement(TracialAlgebra algebra, std::vector<Matrix> data)
    : algebra_(std::move(algebra)), data_(std::move(data)) {
  if (static_cast<int>(data_.size()) != algebra_.num_blocks()) {
    throw StructuralError("element block count does not match algebra");
  }
  for (int i = 0; i < algebra_.num_blocks(); ++i) {
    const int d = algebra_.blocks()[i].dim;
    if (data_[i].rows() != d || data_[i].cols() != d) {
      throw StructuralError("element block shape does not match algebra");
    }
  }
}

AlgebraElement AlgebraElement::zero(const TracialAlgebra& algebra) {
  std::vector<Matrix> data;
  for (const Block& b : algebra.blocks()) data.push_back(Matrix::Zero(b.dim, b.dim));
  return AlgebraElement(algebra, std::move(data));
}

AlgebraElement AlgebraElement::identity(const TracialAlgebra& algebra) {
  std::vector<Matrix> data;
  for (const Block& b : algebra.blocks())
    data.push_back(Matrix::Identity(b.dim, b.dim));
  return AlgebraElement(algebra, std::move(data));
}

AlgebraElement AlgebraElement::matrix_unit(const TracialAlgebra& algebra,
                                           int block, int j, int k) {
  AlgebraElement out = zero(algebra);
  std::vector<Matrix> data = out.data_;
  data[block](j, k) = 1.0;
  return AlgebraElement(algebra, std::move(data));
}

AlgebraElement AlgebraElement::adjoint() const {
  std::vector<Matrix> data;
  data.reserve(data_.size());
  for (const Matrix& m : data_) data.push_back(m.adjoint());
  return AlgebraElement(algebra_, std::move(data));
}

Complex AlgebraElement::trace() const {
  Complex t = 0.0;
  for (int i = 0; i < num_blocks(); ++i) {
    const Block& b = algebra_.blocks()[i];
    t += b.weight * data_[i].trace() / static_cast<double>(b.dim);
  }
  return t;
}

double AlgebraElement::hermitian_deviation() const {
  double dev = 0.0;
  for (const Matrix& m : data_) {
    dev = std::max(dev, largest_singular_value(Matrix(m - m.adjoint())));
  }
  return dev;
}

bool AlgebraElement::is_hermitian(double tolerance) const {
  return hermitian_deviation() <= tolerance;
}

double AlgebraElement::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const Matrix& m : data_) {
    Matrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

bool AlgebraElement::is_positive(double tolerance) const {
  return is_hermitian(tolerance) && min_eigenvalue() >= -tolerance;
}

double AlgebraElement::operator_norm() const {
  double s = 0.0;
  for (const Matrix& m : data_) s = std::max(s, largest_singular_value(m));
  return s;
}

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a, b, "operator+");
  std::vector<Matrix> data;
  data.reserve(a.num_blocks());
  for (int i = 0; i < a.num_blocks(); ++i) data.push_back(a.block(i) + b.block(i));
  return AlgebraElement(a.algebra(), std::move(data));
}

AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a, b, "operator-");
  std::vector<Matrix> data;
  data.reserve(a.num_blocks());
  for (int i = 0; i < a.num_blocks(); ++i) data.push_back(a.block(i) - b.block(i));
  return AlgebraElement(a.algebra(), std::move(data));
}

AlgebraElement operator-(const AlgebraElement& a) { return Complex(-1.0) * a; }

AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a, b, "operator*");
  std::vector<Matrix> data;
  data.reserve(a.num_blocks());
  for (int i = 0; i < a.num_blocks(); ++i) data.push_back(a.block(i) * b.block(i));
  return AlgebraElement(a.algebra(), std::move(data));
}

AlgebraElement operator*(Complex s, const AlgebraElement& a) {
  std::vector<Matrix> data;
  data.reserve(a.num_blocks());
  for (int i = 0; i < a.num_blocks(); ++i) data.push_back(s * a.block(i));
  return AlgebraElement(a.algebra(), std::move(data));
}

AlgebraElement operator*(double s, const AlgebraElement& a) {
  return Complex(s, 0.0) * a;
}

Complex inner_product(const AlgebraElement& a, const AlgebraElement& b) {
  require_same_algebra(a, b, "inner_product");
  Complex t = 0.0;
  for (int i = 0; i < a.num_blocks(); ++i) {
    const Block& blk = a.algebra().blocks()[i];
    t += blk.weight * (a.block(i).adjoint() * b.block(i)).trace() /
         static_cast<double>(blk.dim);
  }
  return t;
}

double schatten_norm(const AlgebraElement& x, double p) {
  if (std::isnan(p) || p < 1.0) {
    throw DomainError("schatten_norm: p must satisfy p >= 1 (or p = inf)");
  }
  if (std::isinf(p)) return x.operator_norm();
  double acc = 0.0;
  for (int i = 0; i < x.num_blocks(); ++i) {
    const Block& blk = x.algebra().blocks()[i];
    const auto sv = x.block(i).jacobiSvd().singularValues();
    double blocksum = 0.0;
    for (int k = 0; k < sv.size(); ++k) blocksum += std::pow(sv(k), p);
    acc += blk.weight * blocksum / static_cast<double>(blk.dim);
  }
  return std::pow(acc, 1.0 / p);
}

AlgebraElement abs_of(const AlgebraElement& x) {
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (int i = 0; i < x.num_blocks(); ++i) {
    Eigen::JacobiSVD<Matrix> svd(x.block(i),
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vector d = svd.singularValues().cast<Complex>();
    blocks.push_back(svd.matrixV() * d.asDiagonal() * svd.matrixV().adjoint());
  }
  return AlgebraElement(x.algebra(), std::move(blocks));
}

AlgebraElement signed_power(const AlgebraElement& x, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("signed_power: alpha must be > 0");
  if (!x.is_hermitian()) {
    throw DomainError("signed_power: element is not self-adjoint; use mazur_map");
  }
  double scale = 0.0;
  for (const Matrix& m : x.blocks()) scale = std::max(scale, m.cwiseAbs().maxCoeff());
  const double cut = tol::kRankCut * scale;
  return map_eigenvalues(x, [&](double lam) {
    if (std::abs(lam) <= cut) return 0.0;
    return (lam > 0.0 ? 1.0 : -1.0) * std::pow(std::abs(lam), alpha);
  });
}

AlgebraElement positive_power(const AlgebraElement& x, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("positive_power: alpha must be > 0");
  return map_eigenvalues(x, [&](double lam) {
    return lam > 0.0 ? std::pow(lam, alpha) : 0.0;
  });
}

AlgebraElement positive_part(const AlgebraElement& x) {
  return map_eigenvalues(x, [](double lam) { return lam > 0.0 ? lam : 0.0; });
}

AlgebraElement negative_part(const AlgebraElement& x) {
  return map_eigenvalues(x, [](double lam) { return lam < 0.0 ? -lam : 0.0; });
}

AlgebraElement mazur_map(const AlgebraElement& x, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0) || std::isinf(p) || std::isinf(q)) {
    throw DomainError("mazur_map: p and q must lie in (0, inf)");
  }
  const double alpha = p / q;
  SvdData data = svd_of(x);
  return map_singular_values(x, data, [&](double s) { return std::pow(s, alpha); });
}

AlgebraElement duality_map(const AlgebraElement& x, double p) {
  if (!(p > 1.0) || std::isinf(p)) {
    throw DomainError("duality_map: p must lie in (1, inf)");
  }
  const double norm = schatten_norm(x, p);
  if (norm < 1e-300) throw DomainError("duality_map: zero element");
  SvdData data = svd_of(x);
  return map_singular_values(
      x, data, [&](double s) { return std::pow(s / norm, p - 1.0); });
}

AlgebraElement embed_2x2(const AlgebraElement& x) {
  TracialAlgebra big = x.algebra().doubled();
  std::vector<Matrix> blocks;
  blocks.reserve(x.num_blocks());
  for (int i = 0; i < x.num_blocks(); ++i) {
    const int d = x.algebra().blocks()[i].dim;
    Matrix m = Matrix::Zero(2 * d, 2 * d);
    m.block(0, d, d, d) = x.block(i);
    m.block(d, 0, d, d) = x.block(i).adjoint();
    blocks.push_back(std::move(m));
  }
  return AlgebraElement(big, std::move(blocks));
}

int coord_index(const TracialAlgebra& algebra, int block, int j, int k) {
  int base = 0;
  for (int i = 0; i < block; ++i) {
    base += algebra.blocks()[i].dim * algebra.blocks()[i].dim;
  }
  return base + j * algebra.blocks()[block].dim + k;
}

Vector to_coords(const AlgebraElement& x) {
  Vector v(x.algebra().coord_dim());
  int pos = 0;
  for (int i = 0; i < x.num_blocks(); ++i) {
    const Block& b = x.algebra().blocks()[i];
    const double scale = std::sqrt(b.weight / static_cast<double>(b.dim));
    for (int j = 0; j < b.dim; ++j)
      for (int k = 0; k < b.dim; ++k) v(pos++) = scale * x.block(i)(j, k);
  }
  return v;
}

AlgebraElement from_coords(const TracialAlgebra& algebra, const Vector& v) {
  if (v.size() != algebra.coord_dim()) {
    throw StructuralError("from_coords: coordinate size mismatch");
  }
  std::vector<Matrix> blocks;
  int pos = 0;
  for (const Block& b : algebra.blocks()) {
    const double scale = std::sqrt(static_cast<double>(b.dim) / b.weight);
    Matrix m(b.dim, b.dim);
    for (int j = 0; j < b.dim; ++j)
      for (int k = 0; k < b.dim; ++k) m(j, k) = scale * v(pos++);
    blocks.push_back(std::move(m));
  }
  return AlgebraElement(algebra, std::move(blocks));
}

}  // namespace mgap
