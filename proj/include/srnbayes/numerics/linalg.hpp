#pragma once

#include <Eigen/Dense>

#include "srnbayes/numerics/rng.hpp"

namespace srnbayes {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct CholeskyResult {
  Matrix L;       // lower triangular, L L^T = A + jitter * I
  double jitter;  // smallest jitter on the ladder that succeeded
};

/// PSD-tolerant Cholesky with a geometric jitter ladder
/// {0, j0, 10 j0, ...} capped at 1e-4 * trace(A) / dim. Rank-deficient inputs
/// are accepted (zero pivots give zero columns); pass require_positive = true
/// to demand strictly positive pivots (needed for log-densities). A negative
/// jitter_start selects the default 1e-12 * trace(A) / dim.
CholeskyResult cholesky_psd(const Matrix& A, double jitter_start = -1.0,
                            bool require_positive = false);

/// Max absolute asymmetry |A - A^T|.
double symmetry_error(const Matrix& A);

void require_symmetric(const Matrix& A, double tol = 1e-12);

/// log N(x; mean, cov) via Cholesky. cov must be PSD (jitter ladder applies).
double mvn_logpdf(const Vector& x, const Vector& mean, const Matrix& cov);

/// mean + L z with z iid standard normal; cov = 0 returns mean exactly.
Vector mvn_sample(RngStream& rng, const Vector& mean, const Matrix& cov);

}  // namespace srnbayes
