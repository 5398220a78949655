#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mgap/bounds.hpp"
#include "mgap/structure.hpp"

namespace mgap {

struct GapOptions {
  int restarts = 20;
  int max_iters = 5000;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  bool record_trace = false;  // keep per-iteration objectives of the best run
};

// Certified lower estimate of c_p with a witness (||w||_p = 1, E_N w = 0,
// ||T(w)||_p = lower), plus the smallest applicable theoretical upper bound.
struct GapEstimate {
  double p = 2.0;
  double lower = 0.0;
  std::optional<AlgebraElement> witness;
  std::optional<double> upper;
  std::optional<UpperSource> upper_source;
  long iterations = 0;
  int restarts_used = 0;
  bool converged = false;
  std::vector<double> objective_trace;  // filled when record_trace is set
};

// Exact L_2 gap: largest singular value of transfer(T) (Id - transfer(E_N))
// in the orthonormal trace basis.
GapEstimate gap_l2(const MarkovMap& t, const Subalgebra& n);

// Lower estimate of c_p for 1 < p < inf via a duality-map power iteration
// with restarts; monotone ascent is enforced by backtracking. The upper
// bracket comes from the forward bounds at the exact c_2 (and from c_2
// itself at p = 2).
GapEstimate gap_lp(const MarkovMap& t, const Subalgebra& n, double p,
                   const GapOptions& opts = {});

// Independent verifier at small dimension (sum of dim^2 <= 16): random
// sampling over the mean-zero sphere refined by coordinatewise hill
// climbing. Shares no code with the duality-map iteration.
GapEstimate gap_lp_oracle(const MarkovMap& t, const Subalgebra& n, double p,
                          long budget, std::uint64_t seed = 1);

}  // namespace mgap
