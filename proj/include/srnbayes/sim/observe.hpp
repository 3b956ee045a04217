#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "srnbayes/numerics/rng.hpp"

namespace srnbayes {

/// One scheduled measurement: which species are read at this time and with
/// what noise standard deviation (diagonal Gaussian).
struct SchedulePoint {
  double time = 0.0;
  std::vector<int> observed;  // species indices, each selecting one G row
  Eigen::VectorXd noise_sd;   // per observed index, >= 0
};

using Schedule = std::vector<SchedulePoint>;

/// y_{t_h} = G_{t_h} s_{t_h} + eps at one schedule point.
struct Observation {
  double time = 0.0;
  std::vector<int> observed;
  Eigen::VectorXd values;
  Eigen::VectorXd noise_sd;  // the generating sd (not visible to inference)
};

struct ObservedTrajectory {
  int id = 0;
  std::vector<Observation> points;
};

/// Partial noisy measurements for M trajectories on a common schedule.
struct ObservationSet {
  std::vector<ObservedTrajectory> trajectories;

  int num_trajectories() const { return static_cast<int>(trajectories.size()); }
};

/// Selection operator for an index set: |J| x N_s with one 1 per row.
Eigen::MatrixXd selection_operator(const std::vector<int>& observed, int num_species);

/// Samples a trajectory (concentration at time t) on the schedule and adds
/// diagonal Gaussian noise. The sampler must cover every schedule time.
ObservedTrajectory observe(const std::function<Eigen::VectorXd(double)>& state_at,
                           const Schedule& schedule, RngStream& rng, int trajectory_id = 0);

Schedule evenly_spaced_schedule(double t0, double dt, int num_intervals,
                                const std::vector<int>& observed,
                                const Eigen::VectorXd& noise_sd);

}  // namespace srnbayes
