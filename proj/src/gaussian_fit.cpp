#include "srnbayes/samplers/gaussian_fit.hpp"

#include <cmath>
#include <limits>

#include "srnbayes/error.hpp"
#include "srnbayes/numerics/linalg.hpp"

namespace srnbayes {

namespace {

constexpr double kPsiDivergence = 1e8;
constexpr int kGrowthLimit = 50;
constexpr int kMaxHalvings = 60;


// One mode step theta + grad * dtau. When the full Euler step lands where
// the log-density is -inf (outside the mapped prior support, or a filter
// failure region), coordinates advance one at a time instead, halving a
// blocked coordinate's move until the iterate is finite with a 3h margin on
// the moved side so the next difference stencil stays evaluable. Unblocked
// coordinates keep their full move; a fully blocked coordinate stays put
// (the iterate slides along the support boundary).
Eigen::VectorXd mode_step(const PosteriorTarget& target, const Eigen::VectorXd& theta,
                          const Eigen::VectorXd& grad, double dtau) {
  Eigen::VectorXd next = theta + grad * dtau;
  if (next.allFinite() && std::isfinite(target(next))) return next;

  next = theta;
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    double move = grad(k) * dtau;
    if (move == 0.0 || !std::isfinite(move)) continue;
    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      Eigen::VectorXd cand = next;
      cand(k) += move;
      Eigen::VectorXd probe = cand;
      probe(k) += 3.0 * target.h_rel() * std::max(1.0, std::abs(cand(k))) *
                  (move > 0.0 ? 1.0 : -1.0);
      if (cand.allFinite() && std::isfinite(target(cand)) && std::isfinite(target(probe))) {
        next = cand;
        break;
      }
      move *= 0.5;
    }
  }
  return next;
}

// Retries a gradient whose stencil failed by nudging the offending
// coordinate away from the nearby support boundary.
Eigen::VectorXd safe_grad(const PosteriorTarget& target, Eigen::VectorXd& theta) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    try {
      return target.grad(theta);
    } catch (const NonFiniteEvaluation& e) {
      const Eigen::Index k = e.coordinate();
      if (k < 0 || k >= theta.size()) throw;
      const double nudge = 4.0 * target.h_rel() * std::max(1.0, std::abs(theta(k)));
      Eigen::VectorXd minus = theta, plus = theta;
      minus(k) -= nudge;
      plus(k) += nudge;
      if (std::isfinite(target(minus))) {
        theta = minus;
      } else if (std::isfinite(target(plus))) {
        theta = plus;
      } else {
        throw;
      }
    }
  }
  return target.grad(theta);
}

double lambda_max_of(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  return eig.eigenvalues().maxCoeff();
}

// One covariance step Psi + (Psi H^T + H Psi + 2I) dtau, symmetrized.
Eigen::MatrixXd psi_step(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& H, double dtau) {
  const Eigen::MatrixXd HP = H * psi;
  Eigen::MatrixXd next =
      psi + (HP + HP.transpose() + 2.0 * Eigen::MatrixXd::Identity(psi.rows(), psi.cols())) * dtau;
  return 0.5 * (next + next.transpose());
}

}  // namespace

double langevin_step_size(double c, int n_theta) {
  return c * std::pow(static_cast<double>(n_theta), -4.5);
}

GaussianPosterior fit_one_stage(const PosteriorTarget& target, const SamplerConfig& cfg,
                                const Eigen::VectorXd& theta0, const Eigen::MatrixXd& psi0) {
  GaussianPosterior out;
  const double dtau = langevin_step_size(cfg.c, target.dim());
  double dtau_psi = dtau;
  Eigen::VectorXd theta = theta0;
  Eigen::MatrixXd psi = psi0;

  int growth_streak = 0;
  int halvings = 0;
  double prev_e2 = std::numeric_limits<double>::infinity();

  try {
    for (long k = 0; k < cfg.max_iters; ++k) {
      const Eigen::VectorXd g = safe_grad(target, theta);
      const Eigen::MatrixXd H = target.hess(theta);
      ++out.grad_evals;
      ++out.hess_evals;

      const Eigen::VectorXd theta_next = mode_step(target, theta, g, dtau);
      Eigen::MatrixXd psi_next = psi_step(psi, H, dtau_psi);
      if (!psi_next.allFinite()) {
        throw NumericalError("one-stage fit: non-finite covariance iterate");
      }

      // A diverging explicit-Euler covariance recursion shows geometrically
      // growing increments; a convergent one has shrinking increments even
      // while the norm still grows toward the fixed point.
      const double e2 = (psi_next - psi).norm();
      growth_streak = e2 > prev_e2 ? growth_streak + 1 : 0;
      if (psi_next.norm() > kPsiDivergence || growth_streak >= kGrowthLimit) {
        if (++halvings > kMaxHalvings) {
          throw NumericalError("one-stage fit: covariance recursion diverged");
        }
        dtau_psi *= 0.5;
        psi = psi0;
        growth_streak = 0;
        prev_e2 = std::numeric_limits<double>::infinity();
        theta = theta_next;
        out.n1 = k + 1;
        continue;
      }
      prev_e2 = e2;

      const double e1 = (theta_next - theta).norm();
      theta = theta_next;
      psi = psi_next;
      out.n1 = k + 1;
      if (e1 <= cfg.eps1 && e2 <= cfg.eps2) {
        out.converged_mode = true;
        out.converged_cov = true;
        break;
      }
    }
  } catch (const NumericalError& err) {
    out.failed = true;
    out.failure = err.what();
    return out;
  }

  out.mode = theta;
  out.cov = psi;
  out.lambda_max = lambda_max_of(psi);
  return out;
}

GaussianPosterior fit_two_stage(const PosteriorTarget& target, const SamplerConfig& cfg,
                                const Eigen::VectorXd& theta0, const Eigen::MatrixXd& psi0) {
  GaussianPosterior out;
  const double dtau = langevin_step_size(cfg.c, target.dim());
  Eigen::VectorXd theta = theta0;

  try {
    // Stage 1: mode recursion alone, one gradient per step.
    for (long k = 0; k < cfg.max_iters; ++k) {
      const Eigen::VectorXd g = safe_grad(target, theta);
      ++out.grad_evals;
      const Eigen::VectorXd theta_next = mode_step(target, theta, g, dtau);
      const double e1 = (theta_next - theta).norm();
      theta = theta_next;
      out.n1 = k + 1;
      if (e1 <= cfg.eps1) {
        out.converged_mode = true;
        break;
      }
    }

    // Stage 2: covariance recursion with the Hessian fixed at the stage-1 mode.
    const Eigen::MatrixXd H = target.hess(theta);
    ++out.hess_evals;
    double dtau_psi = dtau;
    Eigen::MatrixXd psi = psi0;
    int growth_streak = 0;
    int halvings = 0;
    double prev_e2 = std::numeric_limits<double>::infinity();
    for (long k = 0; k < cfg.max_iters; ++k) {
      Eigen::MatrixXd psi_next = psi_step(psi, H, dtau_psi);
      if (!psi_next.allFinite()) throw NumericalError("two-stage fit: non-finite covariance");
      const double e2 = (psi_next - psi).norm();
      growth_streak = e2 > prev_e2 ? growth_streak + 1 : 0;
      if (psi_next.norm() > kPsiDivergence || growth_streak >= kGrowthLimit) {
        if (++halvings > kMaxHalvings) {
          throw NumericalError("two-stage fit: covariance recursion diverged");
        }
        dtau_psi *= 0.5;
        psi = psi0;
        growth_streak = 0;
        prev_e2 = std::numeric_limits<double>::infinity();
        out.n2 = k + 1;
        continue;
      }
      prev_e2 = e2;
      psi = psi_next;
      out.n2 = k + 1;
      if (e2 <= cfg.eps2) {
        out.converged_cov = true;
        break;
      }
    }
    out.mode = theta;
    out.cov = psi;
    out.lambda_max = lambda_max_of(psi);
  } catch (const NumericalError& err) {
    out.failed = true;
    out.failure = err.what();
    return out;
  }
  return out;
}

Eigen::MatrixXd sample_gaussian_posterior(const GaussianPosterior& gp, const ParameterSpace& ps,
                                          int num_samples, RngStream& rng) {
  Eigen::MatrixXd samples(num_samples, gp.mode.size());
  const auto chol = cholesky_psd(gp.cov);
  Eigen::VectorXd z(gp.mode.size());
  for (int b = 0; b < num_samples; ++b) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    const Eigen::VectorXd phi = gp.mode + chol.L.triangularView<Eigen::Lower>() * z;
    samples.row(b) = ps.to_constrained(phi).transpose();
  }
  return samples;
}

}  // namespace srnbayes
