#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "srnbayes/model/parameter_space.hpp"
#include "srnbayes/numerics/rng.hpp"
#include "srnbayes/sim/observe.hpp"

namespace srnbayes {

/// Euclidean norm over all matched (trajectory, time, component) entries.
double discrepancy(const ObservationSet& data, const ObservationSet& simulated);

/// Forward simulator: synthetic data for free parameters on the original
/// scale, generated exactly like the observed data (jump simulation plus
/// simulated measurement error).
using AbcSimulator =
    std::function<ObservationSet(const Eigen::VectorXd& theta_free, RngStream& rng)>;

struct AbcResult {
  Eigen::MatrixXd samples;  // (B, free dim), original scale
  long simulations = 0;
  bool solved = false;
  std::string failure;
};

/// Draw from the prior, simulate, accept iff discrepancy <= epsilon; repeat
/// until B acceptances. Throws InfeasibleThreshold once the running
/// acceptance rate falls below 1e-6 over a trial window.
AbcResult abc_rejection(const AbcSimulator& simulate, const ParameterSpace& ps,
                        const ObservationSet& data, double epsilon, int num_samples,
                        RngStream& rng);

/// Sequential importance resampling through a strictly decreasing threshold
/// schedule; the proposal kernel is componentwise Gaussian with the given
/// standard deviations on the original scale. Throws DegenerateWeights when
/// the effective sample size drops below 2.
AbcResult abc_smc(const AbcSimulator& simulate, const ParameterSpace& ps,
                  const ObservationSet& data, const std::vector<double>& epsilon_schedule,
                  const Eigen::VectorXd& kernel_sd, int num_particles, RngStream& rng);

/// 5%-of-prior-range kernel standard deviations (uniform priors only).
Eigen::VectorXd default_abc_kernel_sd(const ParameterSpace& ps);

}  // namespace srnbayes
