#pragma once

#include <Eigen/Dense>
#include <vector>

#include "srnbayes/lna/filter.hpp"

namespace srnbayes {

struct TrajectoryBands {
  std::vector<double> times;
  Eigen::MatrixXd mean;  // (grid, species)
  Eigen::MatrixXd lo95;
  Eigen::MatrixXd hi95;
};

/// Runs the filter once per draw with a parameter vector picked from
/// theta_samples (rows, original scale), sampling a state from the current
/// filtered marginal N(s_bar_t, Omega^{-1} Gamma_t) at every grid time; grid
/// times at an observation use the post-update moments. Pointwise mean and
/// 2.5/97.5% quantiles are aggregated over draws.
TrajectoryBands infer_trajectory(const ReactionNetwork& net, const ParameterSpace& ps,
                                 const NoiseModel& noise, const Eigen::MatrixXd& theta_samples,
                                 const ObservedTrajectory& data, const std::vector<double>& grid,
                                 int num_draws, const LnaMoments& init, int substeps,
                                 RngStream& rng);

}  // namespace srnbayes
