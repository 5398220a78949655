#include "mgap/gap.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "mgap/rng.hpp"

namespace mgap {

namespace {

double op_norm(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return m.jacobiSvd().singularValues()(0);
}

// N must be the fixed-point algebra of T: E_N must commute with T and the
// eigenvalue-1 space of the transfer must lie inside span(N).
void require_fixed_algebra(const MarkovMap& t, const Subalgebra& n) {
  if (!t.is_valid()) {
    throw StructuralError("gap estimation requires a valid Markov map: " +
                          t.validation().reason());
  }
  if (n.algebra() != t.algebra()) {
    throw StructuralError("gap estimation: subalgebra of a different algebra");
  }
  const Matrix& m = t.transfer();
  const Matrix& q = n.coord_basis();
  Matrix proj = q * q.adjoint();
  if (op_norm(Matrix(m * proj - proj * m)) > 1e-8) {
    throw DomainError(
        "subalgebra is not the fixed-point algebra (commutation residual)");
  }
  const int dim = t.algebra().coord_dim();
  Eigen::JacobiSVD<Matrix> svd(Matrix(m - Matrix::Identity(dim, dim)),
                               Eigen::ComputeFullV);
  for (int k = 0; k < dim; ++k) {
    if (svd.singularValues()(k) <= tol::kFixedSpace) {
      Vector v = svd.matrixV().col(k);
      if ((v - proj * v).norm() > 1e-8) {
        throw DomainError(
            "subalgebra is not the fixed-point algebra (missing fixed vector)");
      }
    }
  }
}

void fill_upper(GapEstimate& est, double c2, double p) {
  std::optional<double> upper;
  std::optional<UpperSource> source;
  if (c2 < 1.0) {
    ForwardBounds fb = forward_bound(c2, p);
    upper = fb.minimum_applicable;
    source = fb.minimum_source;
  }
  if (p == 2.0 && (!upper || c2 < *upper)) {
    upper = c2;
    source = UpperSource::kExactL2;
  }
  est.upper = upper;
  est.upper_source = source;
}

struct AscentState {
  Vector coords;       // current iterate, ||.||_p = 1, inside ran(Id - P_N)
  double objective;    // ||T x||_p
};

}  // namespace

GapEstimate gap_l2(const MarkovMap& t, const Subalgebra& n) {
  require_fixed_algebra(t, n);
  const TracialAlgebra& alg = t.algebra();
  const int dim = alg.coord_dim();
  const Matrix& q = n.coord_basis();
  Matrix complement = Matrix::Identity(dim, dim) - q * q.adjoint();
  Eigen::JacobiSVD<Matrix> svd(Matrix(t.transfer() * complement),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  GapEstimate est;
  est.p = 2.0;
  est.converged = true;
  est.iterations = 0;
  const double sigma = svd.singularValues()(0);
  est.lower = std::max(0.0, sigma);
  est.upper = est.lower;
  est.upper_source = UpperSource::kExactL2;
  if (sigma > 1e-14) {
    Vector w = svd.matrixV().col(0);
    w -= q * (q.adjoint() * w);  // belongs there already; trim roundoff
    w /= w.norm();
    est.witness = from_coords(alg, w);
  }
  return est;
}

GapEstimate gap_lp(const MarkovMap& t, const Subalgebra& n, double p,
                   const GapOptions& opts) {
  if (!(p > 1.0) || std::isinf(p) || std::isnan(p)) {
    throw DomainError(
        "gap_lp: p must lie in (1, inf); the gap does not transfer to the "
        "endpoints p = 1 and p = inf");
  }
  require_fixed_algebra(t, n);
  const TracialAlgebra& alg = t.algebra();
  const int dim = alg.coord_dim();
  const Matrix& q = n.coord_basis();

  GapEstimate est;
  est.p = p;

  GapEstimate l2 = gap_l2(t, n);
  const double c2 = std::min(l2.lower, 1.0);

  if (n.dim() == dim) {
    // N = M: the mean-zero space is trivial.
    est.lower = 0.0;
    est.converged = true;
    fill_upper(est, c2, p);
    return est;
  }

  MarkovMap t_adj = adjoint_channel(t);

  auto project_out = [&](const AlgebraElement& x) {
    Vector v = to_coords(x);
    v -= q * (q.adjoint() * v);
    return from_coords(alg, v);
  };
  // Projection and p-normalization, applied twice: a single pass can leave an
  // amplified fixed-algebra component behind when the projection nearly
  // annihilates the input, which would fake a high objective.
  auto sanitize = [&](AlgebraElement x) -> std::optional<AlgebraElement> {
    for (int round = 0; round < 2; ++round) {
      x = project_out(x);
      const double norm = schatten_norm(x, p);
      if (norm < 1e-14) return std::nullopt;
      x = (1.0 / norm) * x;
    }
    if ((q.adjoint() * to_coords(x)).norm() > 1e-10) return std::nullopt;
    return x;
  };
  auto objective = [&](const AlgebraElement& x) {
    return schatten_norm(t.apply(x), p);
  };

  // Seed list: the L_2 witness, its Mazur transport to L_p, then random
  // mean-zero elements (every third one self-adjoint).
  std::vector<AlgebraElement> seeds;
  if (l2.witness) {
    if (auto s = sanitize(*l2.witness)) seeds.push_back(*s);
    if (auto s = sanitize(mazur_map(*l2.witness, 2.0, p))) seeds.push_back(*s);
  }
  Rng rng(Rng::derive(opts.seed, 0x6a70));
  int draw = 0;
  while (static_cast<int>(seeds.size()) < std::max(1, opts.restarts)) {
    Vector v(dim);
    if (draw % 3 == 2) {
      std::vector<Matrix> blocks;
      for (const Block& b : alg.blocks()) {
        Matrix g(b.dim, b.dim);
        for (int r = 0; r < b.dim; ++r)
          for (int c = 0; c < b.dim; ++c) g(r, c) = rng.complex_gaussian();
        blocks.push_back(0.5 * (g + g.adjoint()));
      }
      v = to_coords(AlgebraElement(alg, std::move(blocks)));
    } else {
      for (int i = 0; i < dim; ++i) v(i) = rng.complex_gaussian();
    }
    ++draw;
    if (auto s = sanitize(from_coords(alg, v))) seeds.push_back(*s);
  }

  double best = 0.0;
  std::optional<AlgebraElement> best_witness;
  bool any_converged = false;
  long total_iters = 0;
  std::vector<double> best_trace;

  for (int r = 0; r < static_cast<int>(seeds.size()); ++r) {
    AlgebraElement x = seeds[r];
    double fx = objective(x);
    bool converged = false;
    std::vector<double> trace;
    if (opts.record_trace) trace.push_back(fx);
    int it = 0;
    for (; it < opts.max_iters; ++it) {
      AlgebraElement tx = t.apply(x);
      if (schatten_norm(tx, p) < 1e-13) {  // the map annihilates this seed
        converged = true;
        break;
      }
      // Gradient of ||T x||_p in the trace pairing, kept inside L_p^0.
      AlgebraElement grad = project_out(t_adj.apply(duality_map(tx, p)));
      if (schatten_norm(grad, 2.0) < 1e-13) {
        converged = true;
        break;
      }
      // Dualize back to L_p (Boyd-style fixed point J_{p'} of the gradient).
      const double pprime = p / (p - 1.0);
      std::optional<AlgebraElement> candidate = sanitize(duality_map(grad, pprime));
      double fc = candidate ? objective(*candidate) : -1.0;
      if (!candidate || fc < fx - 1e-15) {
        // Backtrack toward the candidate until the objective stops dropping.
        bool accepted = false;
        if (candidate) {
          double step = 0.5;
          for (int bt = 0; bt < 40; ++bt) {
            auto blended = sanitize((1.0 - step) * x + step * *candidate);
            if (blended) {
              const double fb = objective(*blended);
              if (fb >= fx - 1e-15) {
                candidate = blended;
                fc = fb;
                accepted = true;
                break;
              }
            }
            step *= 0.5;
          }
        }
        if (!accepted) {
          converged = true;  // no admissible ascent direction left
          break;
        }
      }
      const double delta = fc - fx;
      x = *candidate;
      fx = fc;
      if (opts.record_trace) trace.push_back(fx);
      if (std::abs(delta) < opts.tol * std::max(fx, 1e-30)) {
        converged = true;
        ++it;
        break;
      }
    }
    total_iters += it;
    if (fx > best) {
      best = fx;
      best_witness = x;
      if (opts.record_trace) best_trace = trace;
    }
    any_converged = any_converged || converged;
  }

  est.restarts_used = static_cast<int>(seeds.size());
  est.iterations = total_iters;
  est.converged = any_converged;
  est.objective_trace = std::move(best_trace);
  if (best_witness) {
    // Renormalize and re-evaluate from scratch so the witness reproduces
    // the reported value.
    if (auto w = sanitize(*best_witness)) {
      est.witness = *w;
      est.lower = objective(*w);
    } else {
      est.lower = 0.0;
    }
  } else {
    est.lower = 0.0;
  }
  fill_upper(est, c2, p);
  return est;
}

GapEstimate gap_lp_oracle(const MarkovMap& t, const Subalgebra& n, double p,
                          long budget, std::uint64_t seed) {
  if (!(p > 1.0) || std::isinf(p)) {
    throw DomainError("gap_lp_oracle: p must lie in (1, inf)");
  }
  require_fixed_algebra(t, n);
  const TracialAlgebra& alg = t.algebra();
  const int dim = alg.coord_dim();
  if (dim > 16) throw DomainError("gap_lp_oracle: dimension guard (sum dim^2 <= 16)");
  const Matrix& q = n.coord_basis();

  GapEstimate est;
  est.p = p;
  est.converged = true;
  if (n.dim() == dim) {
    est.lower = 0.0;
    return est;
  }

  // Orthonormal basis of the mean-zero coordinate space.
  Matrix complement = Matrix::Identity(dim, dim) - q * q.adjoint();
  Eigen::JacobiSVD<Matrix> svd(complement, Eigen::ComputeFullU);
  const int free_dim = dim - n.dim();
  Matrix w = svd.matrixU().leftCols(free_dim);

  auto ratio = [&](const Vector& free_coords) -> double {
    AlgebraElement x = from_coords(alg, Vector(w * free_coords));
    const double nx = schatten_norm(x, p);
    if (nx < 1e-300) return -1.0;
    return schatten_norm(t.apply(x), p) / nx;
  };

  Rng rng(Rng::derive(seed, 0x04ac1e));
  std::vector<std::pair<double, Vector>> top;
  for (long s = 0; s < budget; ++s) {
    Vector v(free_dim);
    if (s % 2 == 0) {
      for (int i = 0; i < free_dim; ++i) v(i) = rng.complex_gaussian();
    } else {
      // Self-adjoint draw, expressed through the free coordinates.
      std::vector<Matrix> blocks;
      for (const Block& b : alg.blocks()) {
        Matrix g(b.dim, b.dim);
        for (int r = 0; r < b.dim; ++r)
          for (int c = 0; c < b.dim; ++c) g(r, c) = rng.complex_gaussian();
        blocks.push_back(0.5 * (g + g.adjoint()));
      }
      v = w.adjoint() * to_coords(AlgebraElement(alg, std::move(blocks)));
    }
    const double val = ratio(v);
    if (val < 0.0) continue;
    top.emplace_back(val, v);
    std::push_heap(top.begin(), top.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
    if (top.size() > 3) {
      std::pop_heap(top.begin(), top.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
      top.pop_back();
    }
  }

  double best = 0.0;
  std::optional<Vector> best_v;
  long evals = 0;
  for (auto& [val0, start] : top) {
    Vector v = start / start.norm();
    double val = ratio(v);
    double step = 0.5;
    while (step > 1e-7) {
      bool improved = false;
      for (int d = 0; d < free_dim; ++d) {
        for (Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
          for (double sign : {1.0, -1.0}) {
            Vector cand = v;
            cand(d) += sign * step * dir;
            cand /= cand.norm();
            const double cv = ratio(cand);
            ++evals;
            if (cv > val + 1e-15) {
              v = cand;
              val = cv;
              improved = true;
            }
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    if (val > best) {
      best = val;
      best_v = v;
    }
  }

  est.iterations = budget + evals;
  est.lower = best;
  if (best_v) {
    AlgebraElement x = from_coords(alg, Vector(w * *best_v));
    est.witness = (1.0 / schatten_norm(x, p)) * x;
  }
  return est;
}

}  // namespace mgap
