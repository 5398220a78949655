#pragma once

#include <vector>

#include "mgap/types.hpp"

namespace mgap {

struct Block {
  int dim;
  double weight;
};

// Finite direct sum of full matrix blocks carrying a normalized trace,
// tau(x) = sum_i weight_i * Tr(x_i) / dim_i  with  tau(1) = 1.
//
// All blocks 1x1 models a finite probability space; a single block models
// (M_n, tr/n); several matrix blocks model the dilated algebras used by the
// factorization certificates.
class TracialAlgebra {
 public:
  explicit TracialAlgebra(std::vector<Block> blocks);

  static TracialAlgebra full_matrix(int n);
  static TracialAlgebra commutative(const std::vector<double>& weights);

  const std::vector<Block>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  // Sum of block dimensions (side of the faithful block-diagonal picture).
  int total_dim() const { return total_dim_; }
  // Sum of dim_i^2: the dimension of the algebra as an L_2 space.
  int coord_dim() const { return coord_dim_; }

  // Same block structure, every dimension doubled, weights kept.
  TracialAlgebra doubled() const;

  bool operator==(const TracialAlgebra& other) const;
  bool operator!=(const TracialAlgebra& other) const { return !(*this == other); }

 private:
  std::vector<Block> blocks_;
  int total_dim_ = 0;
  int coord_dim_ = 0;
};

// One complex dim_i x dim_i matrix per block of its algebra. Immutable.
class AlgebraElement {
 public:
  AlgebraElement(TracialAlgebra algebra, std::vector<Matrix> data);

  static AlgebraElement zero(const TracialAlgebra& algebra);
  static AlgebraElement identity(const TracialAlgebra& algebra);
  // Matrix unit e_{jk} of a given block (all other blocks zero).
  static AlgebraElement matrix_unit(const TracialAlgebra& algebra, int block,
                                    int j, int k);

  const TracialAlgebra& algebra() const { return algebra_; }
  int num_blocks() const { return static_cast<int>(data_.size()); }
  const Matrix& block(int i) const { return data_[i]; }
  const std::vector<Matrix>& blocks() const { return data_; }

  AlgebraElement adjoint() const;
  Complex trace() const;  // tau(x)

  double hermitian_deviation() const;  // operator norm of x - x*
  bool is_hermitian(double tolerance = tol::kHermitian) const;
  bool is_positive(double tolerance = tol::kPositivity) const;
  double min_eigenvalue() const;  // of the hermitian part
  double operator_norm() const;   // largest singular value

 private:
  TracialAlgebra algebra_;
  std::vector<Matrix> data_;
};

AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator-(const AlgebraElement& a);
AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement operator*(Complex s, const AlgebraElement& a);
AlgebraElement operator*(double s, const AlgebraElement& a);

// tau(a* b); conjugate symmetric, positive definite.
Complex inner_product(const AlgebraElement& a, const AlgebraElement& b);

// ||x||_p = tau(|x|^p)^(1/p) for p in [1, inf]; p = inf gives the largest
// singular value.
double schatten_norm(const AlgebraElement& x, double p);

AlgebraElement abs_of(const AlgebraElement& x);  // |x| = (x* x)^(1/2)

// x_+^alpha - x_-^alpha for self-adjoint x (spectral calculus; alpha > 0).
AlgebraElement signed_power(const AlgebraElement& x, double alpha);

// Eigenvalues clamped to >= 0 before powering; for inputs positive within
// tolerance only.
AlgebraElement positive_power(const AlgebraElement& x, double alpha);

AlgebraElement positive_part(const AlgebraElement& x);
AlgebraElement negative_part(const AlgebraElement& x);

// Mazur map M_{p,q}(x) = u |x|^{p/q} from the polar decomposition x = u|x|.
// Satisfies ||M_{p,q}(x)||_q = ||x||_p^{p/q}; M_{p,p} is the identity.
AlgebraElement mazur_map(const AlgebraElement& x, double p, double q);

// Norming element J_p(x) = u |x|^{p-1} / ||x||_p^{p-1} for p in (1, inf):
// ||J_p(x)||_{p'} = 1 and Re tau(J_p(x)* x) = ||x||_p, 1/p + 1/p' = 1.
AlgebraElement duality_map(const AlgebraElement& x, double p);

// Self-adjoint corner embedding [[0, x], [x*, 0]] into the doubled algebra.
// Under the normalized trace this preserves every p-norm as is (see README
// on the scale convention).
AlgebraElement embed_2x2(const AlgebraElement& x);

// Coordinates in the orthonormal trace basis sqrt(dim_i/weight_i) * e_{jk}.
// Entry order: blocks in order, each row-major.
Vector to_coords(const AlgebraElement& x);
AlgebraElement from_coords(const TracialAlgebra& algebra, const Vector& v);
int coord_index(const TracialAlgebra& algebra, int block, int j, int k);

}  // namespace mgap
