#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mgap/channels.hpp"

namespace mgap {

enum class UpperSource { kExactL2, kSplitBound, kInterpolationBound, kPstarBound };

std::string to_string(UpperSource s);

// Closed-form transfer bounds c_2 -> c_p. Every value is paired with a
// stably computed complement 1 - value so that slopes near c_2 = 1 survive
// cancellation.
struct ForwardBounds {
  double c2 = 0.0;
  double p = 0.0;
  std::vector<double> case_bounds;        // positive/negative-part case analysis
  double final_bound = 1.0;               // max over the case bounds
  double final_complement = 0.0;          // 1 - final_bound
  double pstar_bound = 1.0;                       // (1 - 2^{2-p*}(1-c2))^{1/p*}
  double pstar_complement = 0.0;
  std::optional<double> interpolation;    // c2^{2/p} 2^{1-2/p}, p > 2, only if < 1
  double minimum_applicable = 1.0;        // min over the valid bounds above
  UpperSource minimum_source = UpperSource::kSplitBound;
};

ForwardBounds forward_bound(double c2, double p);

// Reverse transfer for factorizable maps: a lower bound for the L_2 gap from
// an L_p gap, 1 - ((C/p)(1-cp))^{2/theta} with theta = (1/4) min(p/2, 2/p).
// The universal constant C is supplied by the caller; clamped to [0, 1].
double reverse_bound(double cp, double p, double c_constant);

double reverse_theta(double p);

enum class SlopeTarget { kSplit, kPstar };

// Limit slope of (1 - c_p)/(1 - c_2) as c_2 -> 1 for the chosen bound,
// via finite differences at h in {1e-3, 1e-4, 1e-5} with an agreement gate
// of 5% relative spread (NumericalError beyond that).
double asymptotic_slope(double p, SlopeTarget which);

struct IneqReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass = false;
};

// ||T(x)||_p <= ||T(x^p)||_1^{2/p-1} ||T(x^{p/2})||_2^{2-2/p}, x >= 0, 1<p<2.
IneqReport check_psmall(const MarkovMap& t, const AlgebraElement& x, double p);

// ||T(x^alpha)||_p >= ||T(x)^alpha||_p, x >= 0, alpha >= 1, p >= 1.
IneqReport check_pbig(const MarkovMap& t, const AlgebraElement& x, double alpha,
                      double p);

// ||a^{2/p} - b^{2/p}||_p <= ||a - b||_2^{2/p}, a, b >= 0, p > 2.
IneqReport check_ando(const AlgebraElement& a, const AlgebraElement& b, double p);

struct RatioReport {
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
};

// ||T(M_{2,p}(y)) - M_{2,p}(y)||_p over ||T(y)-y||_2^theta ||y||_2^{1-theta};
// the aggregate over an ensemble estimates the unspecified universal constant.
RatioReport check_pto2(const MarkovMap& t, const AlgebraElement& y, double p);

// ||M_{p,q}(x) - M_{p,q}(y)||_q over ||x - y||_p^{min(1,p/q)} on the unit
// sphere of L_p (inputs are normalized first).
RatioReport check_mazur_holder(const AlgebraElement& x, const AlgebraElement& y,
                               double p, double q);

}  // namespace mgap
