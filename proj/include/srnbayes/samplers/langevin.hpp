#pragma once

#include <Eigen/Dense>
#include <string>

#include "srnbayes/lna/filter.hpp"
#include "srnbayes/numerics/rng.hpp"
#include "srnbayes/samplers/gaussian_fit.hpp"

namespace srnbayes {

/// Drift half of a discretized Langevin step: phi + grad * dtau.
Eigen::VectorXd langevin_drift_step(const Eigen::VectorXd& phi, const Eigen::VectorXd& grad,
                                    double dtau);

struct ChainResult {
  Eigen::MatrixXd samples;  // (B, dim), unconstrained scale
  bool solved = false;
  long steps_taken = 0;
  double acceptance_rate = 0.0;  // MALA only
  std::string failure;
};

/// Unadjusted Langevin algorithm:
///   phi <- phi + grad * dtau + sqrt(2) dW,  dW ~ N(0, dtau I),
/// for burn_in + (B-1) * thin + 1 steps, keeping every thin-th sample after
/// burn-in. A non-finite gradient or iterate marks the run failed (no retry).
ChainResult ula(const PosteriorTarget& target, const SamplerConfig& cfg,
                const Eigen::VectorXd& phi0, RngStream& rng);

/// Metropolis-adjusted Langevin chain started from a draw of the warm-start
/// Gaussian posterior. Proposals with non-finite density are rejected.
ChainResult mala(const PosteriorTarget& target, const GaussianPosterior& warm,
                 const SamplerConfig& cfg, RngStream& rng);

}  // namespace srnbayes
