#include "srnbayes/samplers/langevin.hpp"

#include <cmath>

#include "srnbayes/error.hpp"
#include "srnbayes/numerics/linalg.hpp"

namespace srnbayes {

namespace {

// log q(to | from) up to an additive constant shared by both directions.
double proposal_logdensity(const Eigen::VectorXd& to, const Eigen::VectorXd& from,
                           const Eigen::VectorXd& grad_from, double dtau) {
  return -(to - from - grad_from * dtau).squaredNorm() / (4.0 * dtau);
}

}  // namespace

Eigen::VectorXd langevin_drift_step(const Eigen::VectorXd& phi, const Eigen::VectorXd& grad,
                                    double dtau) {
  return phi + grad * dtau;
}

ChainResult ula(const PosteriorTarget& target, const SamplerConfig& cfg,
                const Eigen::VectorXd& phi0, RngStream& rng) {
  ChainResult out;
  const int dim = target.dim();
  const double dtau = langevin_step_size(cfg.c, dim);
  const double noise_sd = std::sqrt(2.0 * dtau);
  const long total_steps = cfg.burn_in + (cfg.num_samples - 1) * cfg.thin + 1;

  out.samples.resize(cfg.num_samples, dim);
  Eigen::VectorXd phi = phi0;
  int kept = 0;
  try {
    for (long k = 0; k < total_steps; ++k) {
      const Eigen::VectorXd g = target.grad(phi);
      phi = langevin_drift_step(phi, g, dtau);
      for (int i = 0; i < dim; ++i) phi(i) += noise_sd * rng.normal();
      if (!phi.allFinite()) throw NumericalError("ula: non-finite iterate");
      out.steps_taken = k + 1;
      // kept indices are tau_{N0 + (b-1) thin + 1}
      if (k + 1 >= cfg.burn_in + 1 && (k + 1 - cfg.burn_in - 1) % cfg.thin == 0 &&
          kept < cfg.num_samples) {
        out.samples.row(kept++) = phi.transpose();
      }
    }
    out.solved = kept == cfg.num_samples;
  } catch (const NumericalError& err) {
    out.solved = false;
    out.failure = err.what();
  }
  return out;
}

ChainResult mala(const PosteriorTarget& target, const GaussianPosterior& warm,
                 const SamplerConfig& cfg, RngStream& rng) {
  ChainResult out;
  const int dim = target.dim();
  const double dtau = langevin_step_size(cfg.c, dim);
  const double noise_sd = std::sqrt(2.0 * dtau);
  const long total_steps = cfg.burn_in + (cfg.num_samples - 1) * cfg.thin + 1;

  out.samples.resize(cfg.num_samples, dim);
  Eigen::VectorXd phi = mvn_sample(rng, warm.mode, warm.cov);
  int kept = 0;
  long accepted = 0;
  try {
    double logp = target(phi);
    if (!std::isfinite(logp)) throw NumericalError("mala: non-finite start density");
    Eigen::VectorXd grad = target.grad(phi);

    for (long k = 0; k < total_steps; ++k) {
      Eigen::VectorXd prop = langevin_drift_step(phi, grad, dtau);
      for (int i = 0; i < dim; ++i) prop(i) += noise_sd * rng.normal();

      bool accept = false;
      const double logp_prop = target(prop);
      if (std::isfinite(logp_prop)) {
        // Reverse-move density needs the gradient at the proposal; a failed
        // stencil there counts as an automatic rejection.
        Eigen::VectorXd grad_prop;
        bool have_grad = true;
        try {
          grad_prop = target.grad(prop);
        } catch (const NumericalError&) {
          have_grad = false;
        }
        if (have_grad) {
          const double log_ratio = logp_prop - logp +
                                   proposal_logdensity(phi, prop, grad_prop, dtau) -
                                   proposal_logdensity(prop, phi, grad, dtau);
          if (std::log(rng.uniform_open01()) <= log_ratio) {
            phi = prop;
            logp = logp_prop;
            grad = grad_prop;
            accept = true;
          }
        }
      }
      if (accept) ++accepted;
      out.steps_taken = k + 1;
      if (k + 1 >= cfg.burn_in + 1 && (k + 1 - cfg.burn_in - 1) % cfg.thin == 0 &&
          kept < cfg.num_samples) {
        out.samples.row(kept++) = phi.transpose();
      }
    }
    out.solved = kept == cfg.num_samples;
    out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total_steps);
  } catch (const NumericalError& err) {
    out.solved = false;
    out.failure = err.what();
  }
  return out;
}

}  // namespace srnbayes
