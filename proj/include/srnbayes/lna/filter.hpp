#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "srnbayes/model/parameter_space.hpp"
#include "srnbayes/model/reaction_network.hpp"
#include "srnbayes/sim/observe.hpp"

namespace srnbayes {

/// Gaussian surrogate state: mean s_bar and scaled covariance Gamma; the full
/// state covariance is Omega^{-1} Gamma.
struct LnaMoments {
  double time = 0.0;
  Eigen::VectorXd mean;
  Eigen::MatrixXd gamma;
};

struct FilterDiagnostics {
  std::vector<double> predictive_terms;  // one per assimilated observation
  double max_jitter = 0.0;
  long clamp_events = 0;   // rate evaluations that clamped a negative mean
  bool failed = false;
  std::string failure;
};

/// Maps observed species to their measurement-error standard deviation:
/// either a fixed value or an entry of the full parameter vector.
class NoiseModel {
 public:
  struct Entry {
    int species = 0;
    int param = -1;        // index into the full parameter vector, or
    double value = 0;      // a fixed standard deviation
    bool variance = false; // parameter carries the variance, sd = sqrt(param)
  };

  NoiseModel() = default;
  explicit NoiseModel(std::vector<Entry> entries) : entries_(std::move(entries)) {}

  double sd_for(int species, const Eigen::VectorXd& full_params) const;
  Eigen::VectorXd sd_vector(const std::vector<int>& observed,
                            const Eigen::VectorXd& full_params) const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// Integrates the moment ODEs between observations:
///   d s_bar = C v(s_bar) dt
///   d Gamma = Gamma F^T + F Gamma + C diag(v(s_bar)) C^T,  F = d(Cv)/ds.
/// Gamma is symmetrized after every substep. Means are clamped at 0 for rate
/// evaluation; clamps beyond the state tolerance are counted in diagnostics.
LnaMoments lna_propagate(const ReactionNetwork& net, const Eigen::VectorXd& theta,
                         const LnaMoments& m, double t1, int substeps,
                         FilterDiagnostics* diag = nullptr);

struct BayesUpdateResult {
  LnaMoments moments;
  double predictive_loglik = 0.0;
};

/// Conditions the surrogate on y = G s + eps, eps ~ N(0, diag(sigma_sd^2)):
///   alpha = s_bar + Gamma G^T (G Gamma G^T + Omega Sigma)^{-1} (y - G s_bar)
///   beta  = Gamma - Gamma G^T (G Gamma G^T + Omega Sigma)^{-1} G Gamma
/// and returns the predictive term log N(y; G s_bar, Omega^{-1} G Gamma G^T + Sigma).
BayesUpdateResult bayes_update(const LnaMoments& m, const Eigen::VectorXd& y,
                               const std::vector<int>& observed, const Eigen::VectorXd& sigma_sd,
                               double omega, FilterDiagnostics* diag = nullptr);

/// Closed-form likelihood by decomposition: for each trajectory the first
/// observation is assimilated directly from the initial moments, then
/// propagate/update alternate; the sum of predictive terms is returned.
/// Numerical failures yield -inf (diagnostics carry the reason).
double log_likelihood(const ReactionNetwork& net, const ParameterSpace& ps,
                      const NoiseModel& noise, const Eigen::VectorXd& phi,
                      const ObservationSet& data, const LnaMoments& init, int substeps,
                      FilterDiagnostics* diag = nullptr);

double log_posterior(const ReactionNetwork& net, const ParameterSpace& ps,
                     const NoiseModel& noise, const Eigen::VectorXd& phi,
                     const ObservationSet& data, const LnaMoments& init, int substeps,
                     FilterDiagnostics* diag = nullptr);

/// Dense-data likelihood: the one-step transition density of the diffusion
/// approximation evaluated on exactly observed states,
///   prod_h N(y_{h+1}; y_h + C v(y_h) dt, Omega^{-1} C diag(v(y_h)) C^T dt).
double dense_transition_log_likelihood(const ReactionNetwork& net, const ParameterSpace& ps,
                                       const Eigen::VectorXd& phi, const ObservationSet& data);

/// Callable log-posterior with finite-difference derivatives and an
/// evaluation counter (used for equal-budget sampler comparisons).
class PosteriorTarget {
 public:
  using Fn = std::function<double(const Eigen::VectorXd&)>;

  PosteriorTarget(Fn log_density, int dim, double h_rel = 1e-5)
      : fn_(std::move(log_density)), dim_(dim), h_rel_(h_rel) {}

  int dim() const { return dim_; }
  double h_rel() const { return h_rel_; }

  double operator()(const Eigen::VectorXd& phi) const {
    ++evals_;
    return fn_(phi);
  }

  Eigen::VectorXd grad(const Eigen::VectorXd& phi) const;
  Eigen::MatrixXd hess(const Eigen::VectorXd& phi) const;

  long eval_count() const { return evals_; }
  void reset_count() { evals_ = 0; }

 private:
  Fn fn_;
  int dim_;
  double h_rel_;
  mutable long evals_ = 0;
};

PosteriorTarget make_filter_posterior(const ReactionNetwork& net, const ParameterSpace& ps,
                                      const NoiseModel& noise, const ObservationSet& data,
                                      const LnaMoments& init, int substeps, double h_rel = 1e-5);

PosteriorTarget make_dense_posterior(const ReactionNetwork& net, const ParameterSpace& ps,
                                     const ObservationSet& data, double h_rel = 1e-5);

}  // namespace srnbayes
