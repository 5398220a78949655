#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mgap {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Mismatched algebras, broken invariants, malformed structured data.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's mathematical domain.
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Request outside the supported representation classes.
struct UnsupportedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite-difference or iteration diagnostics failed to settle.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {
// Self-adjointness gate: operator norm of x - x*.
inline constexpr double kHermitian = 1e-10;
// Eigenvalue floor for positivity decisions.
inline constexpr double kPositivity = 1e-10;
// Unitality / trace-preservation residuals of a Markov map.
inline constexpr double kMarkov = 1e-10;
// Minimum admissible Choi eigenvalue.
inline constexpr double kChoiFloor = -1e-10;
inline constexpr double kChoiHermitian = 1e-12;
// Singular values below kRankCut * sigma_max are treated as zero.
inline constexpr double kRankCut = 1e-12;
// Subalgebra closure residuals.
inline constexpr double kSubalgebra = 1e-9;
inline constexpr double kGram = 1e-10;
// |sigma| cutoff when extracting the fixed space of a transfer matrix.
inline constexpr double kFixedSpace = 1e-8;
// Slack for the inequality checkers (norms O(1)-normalized).
inline constexpr double kIneqSlack = 1e-9;
}  // namespace tol

}  // namespace mgap
