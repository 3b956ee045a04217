#pragma once

#include <Eigen/Dense>
#include <vector>

#include "srnbayes/model/reaction_network.hpp"
#include "srnbayes/numerics/rng.hpp"

namespace srnbayes {

/// Exact jump path: molecular counts, piecewise constant between events.
/// Concentrations are counts / Omega.
struct JumpTrajectory {
  double t0 = 0.0;
  double t_end = 0.0;
  double omega = 1.0;
  std::vector<double> times;               // event times, times[0] == t0
  std::vector<Eigen::VectorXd> counts;     // counts[i] holds from times[i] on

  /// Counts at time t (state at the last event <= t).
  const Eigen::VectorXd& counts_at(double t) const;
  Eigen::VectorXd concentration_at(double t) const;
};

/// Stochastic simulation algorithm: waiting times Exp(sum_k omega_k) with
/// propensities omega_k = Omega * v_k(s; theta). Terminates at t_end or when
/// all propensities vanish (state frozen). s0 is a concentration with
/// s0 * Omega integer-valued.
JumpTrajectory gillespie(const ReactionNetwork& net, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& s0, double t0, double t_end, RngStream& rng);

/// Streaming SSA that records concentrations only at the requested times
/// (increasing); avoids storing the full event history.
std::vector<Eigen::VectorXd> gillespie_sample_at(const ReactionNetwork& net,
                                                 const Eigen::VectorXd& theta,
                                                 const Eigen::VectorXd& s0, double t0,
                                                 const std::vector<double>& times,
                                                 RngStream& rng);

}  // namespace srnbayes
