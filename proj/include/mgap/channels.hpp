#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mgap/algebra.hpp"

namespace mgap {

class Subalgebra;
class MarkovMap;

// Structured channel representations. Kraus operators live inside the
// algebra, so they cannot move mass between blocks; kernels and conditional
// expectations can.
struct KrausList {
  std::vector<AlgebraElement> ops;  // x -> sum a x a*
};

struct SchurMask {
  Matrix mask;  // single full block: (x_{jk}) -> (s_{jk} x_{jk})
};

struct StochasticKernel {
  RealMatrix kernel;  // commutative algebra: (Tx)_i = sum_j P_ij x_j
};

struct CondExpectation {
  std::shared_ptr<const Subalgebra> onto;
};

struct Composition {
  // apply right-to-left: factors = {S, T} acts as x -> S(T(x))
  std::vector<std::shared_ptr<const MarkovMap>> factors;
};

struct RawTransfer {};  // action given only by the cached transfer matrix

using Representation =
    std::variant<KrausList, SchurMask, StochasticKernel, CondExpectation,
                 Composition, RawTransfer>;

struct ValidationReport {
  double unital_residual = 0.0;
  double trace_residual = 0.0;
  double choi_min_eig = 0.0;
  bool unital_ok = false;
  bool trace_ok = false;
  bool cp_ok = false;
  std::string detail;  // representation-specific note, e.g. "mask not PSD"

  bool ok() const { return unital_ok && trace_ok && cp_ok; }
  std::string reason() const;
};

// Choi certificate, assembled pairwise over (output block, input block).
struct ChoiMatrix {
  std::vector<Matrix> pair_blocks;  // one PSD candidate per (i, j)
  double min_eigenvalue = 0.0;
  double hermitian_deviation = 0.0;
};

// A linear map on a tracial algebra together with its transfer matrix in the
// orthonormal trace basis and the outcome of the three Markov checks
// (unital, completely positive, trace preserving). Invalid maps are allowed
// to exist and carry their reason; gap estimation refuses them.
class MarkovMap {
 public:
  MarkovMap(TracialAlgebra algebra, Representation rep);
  // Raw transfer constructor (adversarial inputs, doubling, adjoints).
  MarkovMap(TracialAlgebra algebra, Matrix transfer);

  const TracialAlgebra& algebra() const { return algebra_; }
  const Representation& representation() const { return rep_; }
  const Matrix& transfer() const { return transfer_; }
  const ValidationReport& validation() const { return validation_; }
  bool is_valid() const { return validation_.ok(); }

  AlgebraElement apply(const AlgebraElement& x) const;  // structured path
  AlgebraElement apply_via_transfer(const AlgebraElement& x) const;

 private:
  TracialAlgebra algebra_;
  Representation rep_;
  Matrix transfer_;
  ValidationReport validation_;
};

MarkovMap identity_channel(const TracialAlgebra& algebra);
MarkovMap kraus_channel(const TracialAlgebra& algebra,
                        std::vector<AlgebraElement> ops);
MarkovMap schur_channel(const TracialAlgebra& algebra, Matrix mask);
MarkovMap stochastic_kernel_channel(const TracialAlgebra& algebra,
                                    RealMatrix kernel);
// (1 - lambda) x + lambda tau(x) 1 on a single full block, in Kraus form.
MarkovMap depolarizing_channel(const TracialAlgebra& algebra, double lambda);
// Convolution by a probability vector on the cyclic group of n points,
// realized as a circulant kernel on the uniform commutative algebra.
MarkovMap cyclic_convolution_channel(const TracialAlgebra& algebra,
                                     const std::vector<double>& distribution);
MarkovMap raw_transfer_channel(const TracialAlgebra& algebra, Matrix transfer);
// Entrywise transposition on a single full block; positive but not CP.
MarkovMap transpose_channel(const TracialAlgebra& algebra);

MarkovMap compose(const MarkovMap& s, const MarkovMap& t);  // x -> s(t(x))
// Trace-pairing adjoint; for a valid Markov map it is again Markov.
MarkovMap adjoint_channel(const MarkovMap& t);
// Id_{M_2} tensor T on the doubled algebra.
MarkovMap doubled_channel(const MarkovMap& t);

ChoiMatrix choi_matrix(const MarkovMap& t);
ValidationReport validate_markov(const MarkovMap& t);

}  // namespace mgap
