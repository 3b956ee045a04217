#include "srnbayes/sim/observe.hpp"

#include "srnbayes/error.hpp"

namespace srnbayes {

Eigen::MatrixXd selection_operator(const std::vector<int>& observed, int num_species) {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(observed.size()),
                                            num_species);
  for (std::size_t r = 0; r < observed.size(); ++r) {
    if (observed[r] < 0 || observed[r] >= num_species) {
      throw DimensionMismatch("selection_operator: species index out of range");
    }
    G(static_cast<Eigen::Index>(r), observed[r]) = 1.0;
  }
  return G;
}

ObservedTrajectory observe(const std::function<Eigen::VectorXd(double)>& state_at,
                           const Schedule& schedule, RngStream& rng, int trajectory_id) {
  ObservedTrajectory traj;
  traj.id = trajectory_id;
  traj.points.reserve(schedule.size());
  for (const auto& pt : schedule) {
    if (pt.noise_sd.size() != static_cast<Eigen::Index>(pt.observed.size())) {
      throw DimensionMismatch("observe: noise_sd length != observed length");
    }
    const Eigen::VectorXd s = state_at(pt.time);
    Observation obs;
    obs.time = pt.time;
    obs.observed = pt.observed;
    obs.noise_sd = pt.noise_sd;
    obs.values.resize(static_cast<Eigen::Index>(pt.observed.size()));
    for (std::size_t r = 0; r < pt.observed.size(); ++r) {
      const double sd = pt.noise_sd(static_cast<Eigen::Index>(r));
      const double eps = sd > 0.0 ? sd * rng.normal() : 0.0;
      obs.values(static_cast<Eigen::Index>(r)) = s(pt.observed[r]) + eps;
    }
    traj.points.push_back(std::move(obs));
  }
  return traj;
}

Schedule evenly_spaced_schedule(double t0, double dt, int num_intervals,
                                const std::vector<int>& observed,
                                const Eigen::VectorXd& noise_sd) {
  Schedule schedule;
  schedule.reserve(static_cast<std::size_t>(num_intervals) + 1);
  for (int h = 0; h <= num_intervals; ++h) {
    SchedulePoint pt;
    pt.time = t0 + h * dt;
    pt.observed = observed;
    pt.noise_sd = noise_sd;
    schedule.push_back(std::move(pt));
  }
  return schedule;
}

}  // namespace srnbayes
