#include "srnbayes/lna/filter.hpp"

#include <cmath>
#include <limits>

#include "srnbayes/error.hpp"
#include "srnbayes/numerics/finite_diff.hpp"
#include "srnbayes/numerics/linalg.hpp"
#include "srnbayes/numerics/ode.hpp"

namespace srnbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTimeEps = 1e-12;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// Joint RK4 step on the packed state [mean; vec(Gamma)] with preallocated
// scratch; symmetrizes Gamma after the step.
class MomentIntegrator {
 public:
  MomentIntegrator(const ReactionNetwork& net, const Eigen::VectorXd& theta,
                   FilterDiagnostics* diag)
      : net_(net),
        theta_(theta),
        diag_(diag),
        n_(net.num_species()),
        v_(net.num_reactions()),
        sc_(n_),
        row_(n_),
        F_(n_, n_),
        FG_(n_, n_) {}

  void field(const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    const auto mean = y.head(n_);
    const Eigen::Map<const Eigen::MatrixXd> gamma(y.data() + n_, n_, n_);
    if (diag_ && (mean.array() < -kStateTolerance).any()) ++diag_->clamp_events;
    sc_ = mean.cwiseMax(0.0);
    net_.eval_rates_into(sc_, theta_, v_);
    net_.jacobian_into(sc_, theta_, F_, row_);

    dy.resize(y.size());
    dy.head(n_).noalias() = net_.stoichiometry() * v_;
    Eigen::Map<Eigen::MatrixXd> dgamma(dy.data() + n_, n_, n_);
    FG_.noalias() = F_ * gamma;
    dgamma = FG_ + FG_.transpose();
    for (int k = 0; k < net_.num_reactions(); ++k) dgamma += v_(k) * net_.stoich_outer()[k];
  }

  void integrate(Eigen::VectorXd& y, double t0, double t1, int substeps) {
    const double h = (t1 - t0) / substeps;
    const VectorField f = [this](double, const Eigen::VectorXd& yy, Eigen::VectorXd& dyy) {
      field(yy, dyy);
    };
    for (int i = 0; i < substeps; ++i) {
      ws_.step(f, t0 + i * h, h, y);
      if (!y.allFinite()) {
        throw IntegrationDiverged(t0 + (i + 1) * h, "lna_propagate: non-finite moments");
      }
      Eigen::Map<Eigen::MatrixXd> gamma(y.data() + n_, n_, n_);
      gamma = 0.5 * (gamma + gamma.transpose()).eval();
    }
  }

 private:
  const ReactionNetwork& net_;
  const Eigen::VectorXd& theta_;
  FilterDiagnostics* diag_;
  int n_;
  Eigen::VectorXd v_, sc_;
  Eigen::RowVectorXd row_;
  Eigen::MatrixXd F_, FG_;
  Rk4Workspace ws_;
};

}  // namespace

double NoiseModel::sd_for(int species, const Eigen::VectorXd& full_params) const {
  for (const auto& e : entries_) {
    if (e.species != species) continue;
    const double level = e.param >= 0 ? full_params(e.param) : e.value;
    return e.variance ? std::sqrt(std::max(level, 0.0)) : level;
  }
  return 0.0;
}

Eigen::VectorXd NoiseModel::sd_vector(const std::vector<int>& observed,
                                      const Eigen::VectorXd& full_params) const {
  Eigen::VectorXd sd(static_cast<Eigen::Index>(observed.size()));
  for (std::size_t r = 0; r < observed.size(); ++r) {
    sd(static_cast<Eigen::Index>(r)) = sd_for(observed[r], full_params);
  }
  return sd;
}

LnaMoments lna_propagate(const ReactionNetwork& net, const Eigen::VectorXd& theta,
                         const LnaMoments& m, double t1, int substeps,
                         FilterDiagnostics* diag) {
  if (t1 < m.time - kTimeEps) throw std::invalid_argument("lna_propagate: t1 < current time");
  if (substeps < 1) throw std::invalid_argument("lna_propagate: substeps < 1");
  const int n = net.num_species();
  if (m.mean.size() != n || m.gamma.rows() != n || m.gamma.cols() != n) {
    throw DimensionMismatch("lna_propagate: moment dimensions");
  }
  if (t1 - m.time <= kTimeEps) return m;

  Eigen::VectorXd y(n + n * n);
  y.head(n) = m.mean;
  Eigen::Map<Eigen::MatrixXd>(y.data() + n, n, n) = m.gamma;

  MomentIntegrator integ(net, theta, diag);
  integ.integrate(y, m.time, t1, substeps);

  LnaMoments out;
  out.time = t1;
  out.mean = y.head(n);
  out.gamma = Eigen::Map<Eigen::MatrixXd>(y.data() + n, n, n);
  return out;
}

BayesUpdateResult bayes_update(const LnaMoments& m, const Eigen::VectorXd& y,
                               const std::vector<int>& observed, const Eigen::VectorXd& sigma_sd,
                               double omega, FilterDiagnostics* diag) {
  const auto p = static_cast<Eigen::Index>(observed.size());
  if (y.size() != p || sigma_sd.size() != p) throw DimensionMismatch("bayes_update: dimensions");

  // G has one 1 per row, so G Gamma G^T and Gamma G^T are index selections.
  Eigen::MatrixXd gamma_cols(m.mean.size(), p);
  Eigen::MatrixXd innov(p, p);
  Eigen::VectorXd resid(p);
  for (Eigen::Index r = 0; r < p; ++r) {
    gamma_cols.col(r) = m.gamma.col(observed[static_cast<std::size_t>(r)]);
    resid(r) = y(r) - m.mean(observed[static_cast<std::size_t>(r)]);
  }
  for (Eigen::Index r = 0; r < p; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) {
      innov(r, c) = gamma_cols(observed[static_cast<std::size_t>(r)], c);
    }
    innov(r, r) += omega * sigma_sd(r) * sigma_sd(r);
  }
  innov = 0.5 * (innov + innov.transpose()).eval();

  const auto chol = cholesky_psd(innov, -1.0, /*require_positive=*/true);
  if (diag) diag->max_jitter = std::max(diag->max_jitter, chol.jitter);

  // Predictive density uses the same factor: cov_pred = innov / Omega.
  const Eigen::VectorXd z = chol.L.triangularView<Eigen::Lower>().solve(resid);
  const double logdet = 2.0 * chol.L.diagonal().array().log().sum();
  const double loglik =
      -0.5 * (p * kLog2Pi + logdet - p * std::log(omega) + omega * z.squaredNorm());

  // K = Gamma G^T innov^{-1}
  Eigen::MatrixXd K = chol.L.triangularView<Eigen::Lower>()
                          .solve(gamma_cols.transpose())
                          .eval();
  K = chol.L.transpose().triangularView<Eigen::Upper>().solve(K).eval();

  BayesUpdateResult out;
  out.moments.time = m.time;
  out.moments.mean = m.mean + K.transpose() * resid;
  out.moments.gamma = m.gamma - K.transpose() * gamma_cols.transpose();
  out.moments.gamma = 0.5 * (out.moments.gamma + out.moments.gamma.transpose()).eval();
  out.predictive_loglik = loglik;
  if (diag) diag->predictive_terms.push_back(loglik);
  return out;
}

double log_likelihood(const ReactionNetwork& net, const ParameterSpace& ps,
                      const NoiseModel& noise, const Eigen::VectorXd& phi,
                      const ObservationSet& data, const LnaMoments& init, int substeps,
                      FilterDiagnostics* diag) {
  if (!phi.allFinite()) return kNegInf;
  Eigen::VectorXd full;
  try {
    full = ps.full_params_unconstrained(phi);
  } catch (const std::exception&) {
    return kNegInf;
  }
  if (!full.allFinite()) return kNegInf;

  double total = 0.0;
  try {
    for (const auto& traj : data.trajectories) {
      LnaMoments m = init;
      for (const auto& obs : traj.points) {
        if (obs.time > m.time + kTimeEps) {
          m = lna_propagate(net, full, m, obs.time, substeps, diag);
        }
        const Eigen::VectorXd sd = noise.sd_vector(obs.observed, full);
        auto upd = bayes_update(m, obs.values, obs.observed, sd, net.system_size(), diag);
        m = std::move(upd.moments);
        total += upd.predictive_loglik;
      }
    }
  } catch (const NumericalError& err) {
    if (diag) {
      diag->failed = true;
      diag->failure = err.what();
    }
    return kNegInf;
  }
  return std::isfinite(total) ? total : kNegInf;
}

double log_posterior(const ReactionNetwork& net, const ParameterSpace& ps,
                     const NoiseModel& noise, const Eigen::VectorXd& phi,
                     const ObservationSet& data, const LnaMoments& init, int substeps,
                     FilterDiagnostics* diag) {
  const double prior = ps.log_prior_unconstrained(phi);
  if (!std::isfinite(prior)) return kNegInf;
  const double lik = log_likelihood(net, ps, noise, phi, data, init, substeps, diag);
  return std::isfinite(lik) ? prior + lik : kNegInf;
}

double dense_transition_log_likelihood(const ReactionNetwork& net, const ParameterSpace& ps,
                                       const Eigen::VectorXd& phi, const ObservationSet& data) {
  if (!phi.allFinite()) return kNegInf;
  Eigen::VectorXd full;
  try {
    full = ps.full_params_unconstrained(phi);
  } catch (const std::exception&) {
    return kNegInf;
  }
  if (!full.allFinite()) return kNegInf;

  const int n = net.num_species();
  double total = 0.0;
  try {
    for (const auto& traj : data.trajectories) {
      for (std::size_t h = 0; h + 1 < traj.points.size(); ++h) {
        const auto& cur = traj.points[h];
        const auto& nxt = traj.points[h + 1];
        if (static_cast<int>(cur.observed.size()) != n) {
          throw DimensionMismatch("dense likelihood requires fully observed states");
        }
        const double dt = nxt.time - cur.time;
        const Eigen::VectorXd v = net.eval_rates(cur.values, full);
        Eigen::VectorXd mean = cur.values + net.stoichiometry() * v * dt;
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
        for (int k = 0; k < net.num_reactions(); ++k) cov += v(k) * net.stoich_outer()[k];
        cov *= dt / net.system_size();
        total += mvn_logpdf(nxt.values, mean, cov);
      }
    }
  } catch (const NumericalError&) {
    return kNegInf;
  }
  return std::isfinite(total) ? total : kNegInf;
}

Eigen::VectorXd PosteriorTarget::grad(const Eigen::VectorXd& phi) const {
  return grad_fd([this](const Eigen::VectorXd& x) { return (*this)(x); }, phi, h_rel_);
}

Eigen::MatrixXd PosteriorTarget::hess(const Eigen::VectorXd& phi) const {
  return hess_fd([this](const Eigen::VectorXd& x) { return (*this)(x); }, phi, h_rel_);
}

PosteriorTarget make_filter_posterior(const ReactionNetwork& net, const ParameterSpace& ps,
                                      const NoiseModel& noise, const ObservationSet& data,
                                      const LnaMoments& init, int substeps, double h_rel) {
  return PosteriorTarget(
      [&net, &ps, &noise, &data, init, substeps](const Eigen::VectorXd& phi) {
        return log_posterior(net, ps, noise, phi, data, init, substeps, nullptr);
      },
      ps.free_dim(), h_rel);
}

PosteriorTarget make_dense_posterior(const ReactionNetwork& net, const ParameterSpace& ps,
                                     const ObservationSet& data, double h_rel) {
  return PosteriorTarget(
      [&net, &ps, &data](const Eigen::VectorXd& phi) {
        const double prior = ps.log_prior_unconstrained(phi);
        if (!std::isfinite(prior)) return kNegInf;
        const double lik = dense_transition_log_likelihood(net, ps, phi, data);
        return std::isfinite(lik) ? prior + lik : kNegInf;
      },
      ps.free_dim(), h_rel);
}

}  // namespace srnbayes
