#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "srnbayes/lna/filter.hpp"
#include "srnbayes/model/parameter_space.hpp"
#include "srnbayes/numerics/rng.hpp"

namespace srnbayes {

struct SamplerConfig {
  double c = 0.5;            // step constant; step size = c * N_theta^{-9/2}
  double eps1 = 1e-5;        // mode increment tolerance
  double eps2 = 1e-5;        // covariance increment tolerance (Frobenius)
  long max_iters = 50000;    // per iterative process
  long burn_in = 1000;       // ULA / MALA warm-up N0
  long thin = 10;            // keep one sample every thin steps
  int num_samples = 100;     // B
  std::uint64_t seed = 0;
};

double langevin_step_size(double c, int n_theta);

/// Gaussian posterior approximation on the unconstrained scale: the mode, the
/// covariance of the stationary Gaussian, and its largest eigenvalue.
struct GaussianPosterior {
  Eigen::VectorXd mode;
  Eigen::MatrixXd cov;
  double lambda_max = 0.0;
  long n1 = 0;  // mode iterations (or joint iterations for the one-stage fit)
  long n2 = 0;  // covariance iterations (two-stage only)
  bool converged_mode = false;
  bool converged_cov = false;
  long grad_evals = 0;
  long hess_evals = 0;
  bool failed = false;
  std::string failure;
};

/// Jointly iterates
///   theta <- theta + grad * dtau
///   Psi   <- Psi + (Psi H^T + H Psi + 2 I) * dtau
/// with H the Hessian at the current theta, until both increments fall below
/// (eps1, eps2) or max_iters. If the covariance recursion diverges (Frobenius
/// norm above 1e8, or growth for 50 consecutive steps), its step size is
/// halved and Psi restarts from psi0; the mode recursion is unaffected.
GaussianPosterior fit_one_stage(const PosteriorTarget& target, const SamplerConfig& cfg,
                                const Eigen::VectorXd& theta0, const Eigen::MatrixXd& psi0);

/// Stage 1 iterates the mode recursion alone (N1 gradient evaluations), then
/// the Hessian is computed once at the stage-1 mode and stage 2 iterates the
/// covariance recursion with that fixed Hessian (N2 steps).
GaussianPosterior fit_two_stage(const PosteriorTarget& target, const SamplerConfig& cfg,
                                const Eigen::VectorXd& theta0, const Eigen::MatrixXd& psi0);

/// B draws from N(mode, cov) mapped back to the constrained scale (rows are
/// samples over the free parameters).
Eigen::MatrixXd sample_gaussian_posterior(const GaussianPosterior& gp, const ParameterSpace& ps,
                                          int num_samples, RngStream& rng);

}  // namespace srnbayes
