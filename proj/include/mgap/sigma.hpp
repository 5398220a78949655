#pragma once

#include "mgap/gap.hpp"

namespace mgap {

// A pair of subalgebras A, B with N = A intersect B, the three conditional
// expectations, and the composition T = E_A E_B whose fixed points are N.
struct SigmaInstance {
  TracialAlgebra algebra;
  Subalgebra a;
  Subalgebra b;
  Subalgebra n;
  MarkovMap expect_a;
  MarkovMap expect_b;
  MarkovMap expect_n;
  MarkovMap t;  // E_A E_B
};

SigmaInstance make_sigma_instance(const Subalgebra& a, const Subalgebra& b);

// ||x||_{Sigma,p} = ||(1-E_A)x||_p + ||(1-E_B)x||_p on the mean-zero space.
// Requires E_N(x) = 0 (to 1e-9).
double sigma_norm(const SigmaInstance& inst, const AlgebraElement& x, double p);

struct EquivalenceResult {
  double p = 2.0;
  double worst_ratio = 0.0;  // max ||x||_p / ||x||_{Sigma,p} found
  std::optional<AlgebraElement> witness;
  double c2 = 0.0;           // exact L_2 gap of E_A E_B
  std::optional<double> cp_upper;
  std::optional<double> certified_bound;  // 1 / (1 - cp_upper), when certified
  bool certified = false;             // cp_upper < 1
  bool within_certified_bound = true;     // worst_ratio <= certified_bound + 1e-6
};

// Maximizes ||x||_p / ||x||_{Sigma,p} over the mean-zero space with the same
// restart/backtracking machinery as gap_lp, driven by a subgradient of the
// sum of the two deviation norms.
EquivalenceResult equivalence_ratio(const SigmaInstance& inst, double p,
                                    const GapOptions& opts = {});

struct SweepRow {
  double p = 2.0;
  GapEstimate gap_ab;  // E_A E_B
  GapEstimate gap_ba;  // E_B E_A
  EquivalenceResult equivalence;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  bool all_or_nothing = false;   // every p certified or none
  bool symmetry_ok = false;      // L_2 gaps of E_A E_B and E_B E_A agree
  double max_l2_asymmetry = 0.0;
};

SweepReport corollary_sweep(const SigmaInstance& inst,
                            const std::vector<double>& ps,
                            const GapOptions& opts = {});

}  // namespace mgap
