#include "srnbayes/numerics/linalg.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "srnbayes/error.hpp"

namespace srnbayes {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// One factorization attempt at a fixed jitter. Returns L on success.
std::optional<Matrix> try_factor(const Matrix& A, double jitter, bool require_positive) {
  const auto n = A.rows();
  const double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
  const double tol = 1e-11 * scale;

  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double d = A(k, k) + jitter - L.row(k).head(k).squaredNorm();
    if (d < -tol) return std::nullopt;
    if (require_positive && d <= tol) return std::nullopt;
    d = std::max(d, 0.0);
    const double lkk = std::sqrt(d);
    L(k, k) = lkk;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double v = A(i, k) - L.row(i).head(k).dot(L.row(k).head(k));
      if (lkk > 0.0) {
        L(i, k) = v / lkk;
      } else if (std::abs(v) > tol) {
        return std::nullopt;  // zero pivot with nonzero column: not PSD
      }
    }
  }
  return L;
}

}  // namespace

CholeskyResult cholesky_psd(const Matrix& A, double jitter_start, bool require_positive) {
  if (A.rows() != A.cols()) throw DimensionMismatch("cholesky_psd: matrix not square");
  const auto n = A.rows();
  const double trace_per_dim = n > 0 ? A.trace() / static_cast<double>(n) : 0.0;
  if (jitter_start < 0.0) jitter_start = 1e-12 * trace_per_dim;
  const double cap = 1e-4 * trace_per_dim;

  double jitter = 0.0;
  while (true) {
    if (auto L = try_factor(A, jitter, require_positive)) {
      return {std::move(*L), jitter};
    }
    if (jitter == 0.0) {
      jitter = jitter_start;
      if (jitter <= 0.0 || jitter > cap) break;
    } else {
      jitter *= 10.0;
      if (jitter > cap) break;
    }
  }
  throw NotPositiveSemidefinite("cholesky_psd: failed at max jitter " + std::to_string(cap));
}

double symmetry_error(const Matrix& A) {
  return (A - A.transpose()).cwiseAbs().maxCoeff();
}

void require_symmetric(const Matrix& A, double tol) {
  if (A.rows() != A.cols()) throw DimensionMismatch("require_symmetric: matrix not square");
  const auto n = A.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double scale = std::max({1.0, std::abs(A(i, j)), std::abs(A(j, i))});
      if (std::abs(A(i, j) - A(j, i)) > tol * scale) {
        throw DimensionMismatch("require_symmetric: asymmetric at (" + std::to_string(i) + "," +
                                std::to_string(j) + ")");
      }
    }
  }
}

double mvn_logpdf(const Vector& x, const Vector& mean, const Matrix& cov) {
  const auto d = x.size();
  if (mean.size() != d || cov.rows() != d || cov.cols() != d) {
    throw DimensionMismatch("mvn_logpdf: dimension mismatch");
  }
  const auto chol = cholesky_psd(cov, -1.0, /*require_positive=*/true);
  const Vector z = chol.L.triangularView<Eigen::Lower>().solve(x - mean);
  const double logdet = 2.0 * chol.L.diagonal().array().log().sum();
  return -0.5 * (d * kLog2Pi + logdet + z.squaredNorm());
}

Vector mvn_sample(RngStream& rng, const Vector& mean, const Matrix& cov) {
  const auto d = mean.size();
  if (cov.rows() != d || cov.cols() != d) throw DimensionMismatch("mvn_sample: dimension mismatch");
  const auto chol = cholesky_psd(cov);
  Vector z(d);
  for (Eigen::Index i = 0; i < d; ++i) z(i) = rng.normal();
  return mean + chol.L.triangularView<Eigen::Lower>() * z;
}

}  // namespace srnbayes
