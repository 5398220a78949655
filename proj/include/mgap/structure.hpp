#pragma once

#include <vector>

#include "mgap/channels.hpp"

namespace mgap {

// A unital *-subalgebra, stored as an orthonormal basis for the trace inner
// product. The constructor verifies orthonormality, closure under adjoints
// and products, and that the identity lies in the span.
class Subalgebra {
 public:
  Subalgebra(TracialAlgebra algebra, std::vector<AlgebraElement> basis);

  const TracialAlgebra& algebra() const { return algebra_; }
  const std::vector<AlgebraElement>& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  // Columns are the coordinates of the basis elements.
  const Matrix& coord_basis() const { return coords_; }

  // Orthogonal projection onto the span (the trace-preserving conditional
  // expectation, as a plain function).
  AlgebraElement project(const AlgebraElement& x) const;
  double span_residual(const AlgebraElement& x) const;
  bool contains(const AlgebraElement& x, double tolerance = tol::kSubalgebra) const;

 private:
  TracialAlgebra algebra_;
  std::vector<AlgebraElement> basis_;
  Matrix coords_;
};

// Smallest unital *-subalgebra containing the generators.
Subalgebra generate_subalgebra(const TracialAlgebra& algebra,
                               const std::vector<AlgebraElement>& generators);

Subalgebra scalar_subalgebra(const TracialAlgebra& algebra);
Subalgebra full_subalgebra(const TracialAlgebra& algebra);
// Diagonal matrices across all blocks.
Subalgebra diagonal_subalgebra(const TracialAlgebra& algebra);
// Tilted maximal abelian subalgebra of M_2: the pair (diagonal, tilted) is
// built so that the composition E_diag E_tilted contracts mean-zero parts of
// L_2 by exactly cos^2(theta). See README for the convention.
Subalgebra rotated_diagonal_subalgebra(const TracialAlgebra& algebra,
                                       double theta);

// Intersection of spans via principal angles (cos >= 1 - 1e-9 kept).
Subalgebra intersect(const Subalgebra& a, const Subalgebra& b);

// Largest principal-angle cosine between the two spans with the directions
// of `common` removed; diagnostics for subalgebra pairs.
double principal_angle_cosine(const Subalgebra& a, const Subalgebra& b,
                              const Subalgebra& common);

MarkovMap conditional_expectation(const Subalgebra& s);

// Fixed-point algebra of a valid Markov map, read off the transfer matrix's
// eigenvalue-1 eigenspace. Throws StructuralError if the eigenspace fails the
// algebra-closure invariants (possible only for invalid transfer inputs).
Subalgebra fixed_point_algebra(const MarkovMap& t);

// One branch of a dilation: x -> u (x o sigma) u*, where sigma permutes
// blocks of equal dimension and weight (identity for inner branches).
struct DilationBranch {
  double weight;
  std::vector<int> block_perm;  // target block i reads source block_perm[i]
  AlgebraElement unitary;
};

// Explicit factorization witness: a bigger algebra containing N copies of the
// base, the diagonal embedding iota, the *-homomorphism pi built from the
// branches, and the conditional expectation onto iota(base).
struct DilationCertificate {
  TracialAlgebra base;
  TracialAlgebra dilated;
  std::vector<DilationBranch> branches;

  AlgebraElement embed(const AlgebraElement& x) const;      // iota
  AlgebraElement represent(const AlgebraElement& x) const;  // pi
  // E onto iota(base), returned inside the dilated algebra.
  AlgebraElement expect_onto_base(const AlgebraElement& y) const;
  // Same expectation, identified back with the base algebra.
  AlgebraElement compress(const AlgebraElement& y) const;
};

// Supported classes: weighted families of unitaries (random-unitary Kraus),
// doubly stochastic kernels over uniform weights (via a Birkhoff
// decomposition into permutations), and conditional expectations reachable by
// a finite averaging family of unitaries. Everything else throws
// UnsupportedError.
DilationCertificate build_dilation(const MarkovMap& t);

struct FactorizationReport {
  double action_residual = 0.0;   // max ||T(b) - E pi(b)||_2 over a basis
  double trace_residual = 0.0;    // max |tau(b) - tau~(pi(b))|
  double hom_residual = 0.0;      // pi(bc) vs pi(b)pi(c)
  double adjoint_residual = 0.0;  // pi(b*) vs pi(b)*
  double embed_residual = 0.0;    // E iota(b) vs iota(b)
  bool pass = false;
};

FactorizationReport verify_factorization(const DilationCertificate& cert,
                                         const MarkovMap& t);

// Kraus decomposition a_l = sqrt(p_l) u_l with each u_l unitary, if the
// channel has one; empty optional otherwise. Helper shared by build_dilation
// and the samplers.
struct UnitaryFamily {
  std::vector<double> weights;
  std::vector<AlgebraElement> unitaries;
};

}  // namespace mgap
