#pragma once

#include "mgap/rng.hpp"
#include "mgap/structure.hpp"

namespace mgap {

AlgebraElement random_element(const TracialAlgebra& algebra, Rng& rng);
AlgebraElement random_hermitian(const TracialAlgebra& algebra, Rng& rng);
// g* g scaled to unit p = 2 norm; strictly positive off a null set.
AlgebraElement random_positive(const TracialAlgebra& algebra, Rng& rng);
// Blockwise Haar unitary (QR of a Gaussian with phase fix).
AlgebraElement random_unitary_element(const TracialAlgebra& algebra, Rng& rng);
// Normal element with a random complex spectrum in the unit disk.
AlgebraElement random_normal(const TracialAlgebra& algebra, Rng& rng);

std::vector<double> random_probability_vector(int n, Rng& rng);

// sum p_l u_l . u_l* — always Markov, and factorizable by construction.
MarkovMap random_mixed_unitary_channel(const TracialAlgebra& algebra,
                                       int branches, Rng& rng);
// Correlation-matrix Schur mask on a single full block.
MarkovMap random_schur_channel(const TracialAlgebra& algebra, Rng& rng);
// Sinkhorn-balanced doubly stochastic kernel over uniform weights.
MarkovMap random_doubly_stochastic_channel(const TracialAlgebra& algebra,
                                           Rng& rng);
// Generic unital trace-preserving channel on a single full block, produced
// by operator Sinkhorn on a random Choi matrix; falls back to mixed-unitary
// if balancing stalls.
MarkovMap random_unital_channel(const TracialAlgebra& algebra, Rng& rng);
// Mixed bag of the above kinds (single full block).
MarkovMap random_channel(const TracialAlgebra& algebra, Rng& rng);

// Diagonal subalgebra conjugated by a random unitary.
Subalgebra random_masa(const TracialAlgebra& algebra, Rng& rng);

}  // namespace mgap
