#include "mgap/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace mgap {

namespace {

// 1 - (1 - eps)^{1/p} without cancellation for tiny eps.
double one_minus_root(double eps, double p) {
  if (eps >= 1.0) return 1.0;
  return -std::expm1(std::log1p(-eps) / p);
}

struct BoundValue {
  double value;
  double complement;
};

BoundValue from_eps(double eps, double p) {
  const double c = one_minus_root(eps, p);
  return BoundValue{1.0 - c, c};
}

void require_forward_domain(double c2, double p) {
  if (!(c2 >= 0.0) || c2 >= 1.0) {
    throw DomainError("forward_bound: c2 must lie in [0, 1)");
  }
  if (!(p > 1.0) || std::isinf(p)) {
    throw DomainError("forward_bound: p must lie in (1, inf)");
  }
}

}  // namespace

std::string to_string(UpperSource s) {
  switch (s) {
    case UpperSource::kExactL2: return "exact-L2";
    case UpperSource::kSplitBound: return "split-bound";
    case UpperSource::kInterpolationBound: return "interpolation-bound";
    case UpperSource::kPstarBound: return "pstar-bound";
  }
  return "?";
}

ForwardBounds forward_bound(double c2, double p) {
  require_forward_domain(c2, p);
  ForwardBounds out;
  out.c2 = c2;
  out.p = p;

  const double one_minus_c2sq = (1.0 - c2) * (1.0 + c2);
  std::vector<BoundValue> cases;

  if (p < 2.0) {
    // Case gamma_+ <= c2^{(2p-2)/p}: ((1 + c2^{2p-2}) / 2)^{1/p}.
    const double e_direct =
        c2 > 0.0 ? -std::expm1((2.0 * p - 2.0) * std::log(c2)) : 1.0;
    cases.push_back(from_eps(0.5 * e_direct, p));
    // Small-negative-part case with K = (144 + c2^2)/145.
    const double k_eps = one_minus_c2sq / 145.0;  // 1 - K
    const double a = (p - 1.0) / p;               // (2p-2)/(2p)
    const double one_minus_k_a = -std::expm1(a * std::log1p(-k_eps));
    cases.push_back(from_eps(0.5 * one_minus_k_a, p));
    // Worst case, both exponent readings of the final display.
    const double fourp = std::pow(4.0, p);
    for (double e : {(2.0 * p - 2.0) / 2.0, a}) {
      const double one_minus_k_e = -std::expm1(e * std::log1p(-k_eps));
      cases.push_back(from_eps(one_minus_k_e / fourp, p));
    }
  } else {
    // Case gamma_+ <= c2^{2/p}: ((1 + c2^2)/2)^{1/p}.
    cases.push_back(from_eps(0.5 * one_minus_c2sq, p));
    // delta_p = (1/2)(1 - 2^{-1/p}) case.
    const double delta = 0.5 * (1.0 - std::pow(2.0, -1.0 / p));
    const double dp = std::pow(delta, p);
    cases.push_back(from_eps(dp * one_minus_c2sq / (2.0 * (1.0 + dp)), p));
  }

  out.final_bound = 0.0;
  out.final_complement = 1.0;
  for (const BoundValue& b : cases) {
    out.case_bounds.push_back(b.value);
    if (b.complement < out.final_complement) {
      out.final_complement = b.complement;
      out.final_bound = b.value;
    }
  }

  const double pstar = std::max(p, p / (p - 1.0));
  const double pstar_eps = std::pow(2.0, 2.0 - pstar) * (1.0 - c2);
  const BoundValue pb = from_eps(pstar_eps, pstar);
  out.pstar_bound = pb.value;
  out.pstar_complement = pb.complement;

  out.minimum_applicable = out.final_bound;
  out.minimum_source = UpperSource::kSplitBound;
  if (out.pstar_bound < out.minimum_applicable) {
    out.minimum_applicable = out.pstar_bound;
    out.minimum_source = UpperSource::kPstarBound;
  }
  if (p > 2.0) {
    const double interp = std::pow(c2, 2.0 / p) * std::pow(2.0, 1.0 - 2.0 / p);
    if (interp < 1.0) {
      out.interpolation = interp;
      if (interp < out.minimum_applicable) {
        out.minimum_applicable = interp;
        out.minimum_source = UpperSource::kInterpolationBound;
      }
    }
  }
  return out;
}

double reverse_theta(double p) {
  return 0.25 * std::min(p / 2.0, 2.0 / p);
}

double reverse_bound(double cp, double p, double c_constant) {
  if (!(cp >= 0.0) || cp >= 1.0) {
    throw DomainError("reverse_bound: cp must lie in [0, 1)");
  }
  if (!(p > 1.0) || std::isinf(p) || p == 2.0) {
    throw DomainError("reverse_bound: p must lie in (1, inf) with p != 2");
  }
  if (!(c_constant > 0.0)) {
    throw DomainError("reverse_bound: the assumed constant must be positive");
  }
  const double theta = reverse_theta(p);
  const double t = (c_constant / p) * (1.0 - cp);
  const double delta = std::pow(t, 2.0 / theta);
  return std::clamp(1.0 - delta, 0.0, 1.0);
}

double asymptotic_slope(double p, SlopeTarget which) {
  double slopes[3];
  const double hs[3] = {1e-3, 1e-4, 1e-5};
  for (int i = 0; i < 3; ++i) {
    ForwardBounds b = forward_bound(1.0 - hs[i], p);
    const double complement =
        which == SlopeTarget::kSplit ? b.final_complement : b.pstar_complement;
    slopes[i] = complement / hs[i];
  }
  const double lo = std::min({slopes[0], slopes[1], slopes[2]});
  const double hi = std::max({slopes[0], slopes[1], slopes[2]});
  if (!(lo > 0.0) || (hi - lo) > 0.05 * hi) {
    throw NumericalError("asymptotic_slope: finite differences did not settle");
  }
  return slopes[2];
}

IneqReport check_psmall(const MarkovMap& t, const AlgebraElement& x, double p) {
  if (!(p > 1.0) || !(p < 2.0)) throw DomainError("check_psmall: need 1 < p < 2");
  if (!x.is_positive()) throw DomainError("check_psmall: x must be positive");
  IneqReport r;
  r.lhs = schatten_norm(t.apply(x), p);
  const double n1 = schatten_norm(t.apply(positive_power(x, p)), 1.0);
  const double n2 = schatten_norm(t.apply(positive_power(x, p / 2.0)), 2.0);
  r.rhs = std::pow(n1, 2.0 / p - 1.0) * std::pow(n2, 2.0 - 2.0 / p);
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs + tol::kIneqSlack;
  return r;
}

IneqReport check_pbig(const MarkovMap& t, const AlgebraElement& x, double alpha,
                      double p) {
  if (!(alpha >= 1.0)) throw DomainError("check_pbig: need alpha >= 1");
  if (!(p >= 1.0)) throw DomainError("check_pbig: need p >= 1");
  if (!x.is_positive()) throw DomainError("check_pbig: x must be positive");
  IneqReport r;
  r.lhs = schatten_norm(positive_power(t.apply(x), alpha), p);
  r.rhs = schatten_norm(t.apply(positive_power(x, alpha)), p);
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs + tol::kIneqSlack;
  return r;
}

IneqReport check_ando(const AlgebraElement& a, const AlgebraElement& b, double p) {
  if (!(p > 2.0)) throw DomainError("check_ando: need p > 2");
  if (!a.is_positive() || !b.is_positive()) {
    throw DomainError("check_ando: both elements must be positive");
  }
  IneqReport r;
  const double e = 2.0 / p;
  r.lhs = schatten_norm(positive_power(a, e) - positive_power(b, e), p);
  r.rhs = std::pow(schatten_norm(a - b, 2.0), e);
  r.margin = r.rhs - r.lhs;
  r.pass = r.lhs <= r.rhs + tol::kIneqSlack;
  return r;
}

RatioReport check_pto2(const MarkovMap& t, const AlgebraElement& y, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("check_pto2: p in (1, inf)");
  const double ynorm = schatten_norm(y, 2.0);
  if (ynorm < 1e-300) throw DomainError("check_pto2: y must be nonzero");
  RatioReport r;
  AlgebraElement m = mazur_map(y, 2.0, p);
  r.numerator = schatten_norm(t.apply(m) - m, p);
  const double theta = reverse_theta(p);
  const double drift = schatten_norm(t.apply(y) - y, 2.0);
  r.denominator = std::pow(drift, theta) * std::pow(ynorm, 1.0 - theta);
  if (r.denominator < 1e-14 && r.numerator < 1e-12) {
    r.ratio = 0.0;
  } else {
    r.ratio = r.numerator / r.denominator;
  }
  return r;
}

RatioReport check_mazur_holder(const AlgebraElement& x, const AlgebraElement& y,
                               double p, double q) {
  const double nx = schatten_norm(x, p);
  const double ny = schatten_norm(y, p);
  if (nx < 1e-300 || ny < 1e-300) {
    throw DomainError("check_mazur_holder: inputs must be nonzero");
  }
  AlgebraElement xs = (1.0 / nx) * x;
  AlgebraElement ys = (1.0 / ny) * y;
  RatioReport r;
  r.numerator = schatten_norm(mazur_map(xs, p, q) - mazur_map(ys, p, q), q);
  const double dist = schatten_norm(xs - ys, p);
  r.denominator = std::pow(dist, std::min(1.0, p / q));
  if (dist < 1e-15) {
    r.ratio = 0.0;
  } else {
    r.ratio = r.numerator / r.denominator;
  }
  return r;
}

}  // namespace mgap
