#include "srnbayes/sim/gillespie.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srnbayes/error.hpp"

namespace srnbayes {

namespace {

void check_initial(const ReactionNetwork& net, const Eigen::VectorXd& s0, double t0,
                   double t_end) {
  if (s0.size() != net.num_species()) throw DimensionMismatch("gillespie: s0 dimension");
  if (t_end <= t0) throw std::invalid_argument("gillespie: t_end must exceed t0");
  for (Eigen::Index j = 0; j < s0.size(); ++j) {
    const double x = s0(j) * net.system_size();
    if (x < 0.0 || std::abs(x - std::round(x)) > 1e-9) {
      throw std::invalid_argument("gillespie: s0 * Omega must be nonnegative integers");
    }
  }
}

// Core SSA loop; calls on_event(t, counts) after every jump.
template <typename OnEvent>
void run_ssa(const ReactionNetwork& net, const Eigen::VectorXd& theta, const Eigen::VectorXd& s0,
             double t0, double t_end, RngStream& rng, OnEvent&& on_event) {
  const double omega = net.system_size();
  Eigen::VectorXd x = (s0 * omega).array().round().matrix();
  Eigen::VectorXd conc = x / omega;
  Eigen::VectorXd v(net.num_reactions());
  double t = t0;
  while (true) {
    net.eval_rates_into(conc, theta, v);
    const double total = omega * v.sum();
    if (total <= 0.0) break;  // all propensities zero: state frozen
    t += rng.exponential(total);
    if (t > t_end) break;
    const int k = rng.pick_weighted(v.data(), net.num_reactions(), v.sum());
    x += net.stoichiometry().col(k);
    conc = x / omega;
    on_event(t, x);
  }
}

}  // namespace

const Eigen::VectorXd& JumpTrajectory::counts_at(double t) const {
  if (t < t0 - 1e-12 || t > t_end + 1e-12) {
    throw std::out_of_range("JumpTrajectory: time outside the simulated span");
  }
  // last event time <= t (left-continuous piecewise constant)
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(times.begin(), it));
  return counts[idx == 0 ? 0 : idx - 1];
}

Eigen::VectorXd JumpTrajectory::concentration_at(double t) const { return counts_at(t) / omega; }

JumpTrajectory gillespie(const ReactionNetwork& net, const Eigen::VectorXd& theta,
                         const Eigen::VectorXd& s0, double t0, double t_end, RngStream& rng) {
  check_initial(net, s0, t0, t_end);
  JumpTrajectory traj;
  traj.t0 = t0;
  traj.t_end = t_end;
  traj.omega = net.system_size();
  traj.times.push_back(t0);
  traj.counts.push_back((s0 * net.system_size()).array().round().matrix());
  run_ssa(net, theta, s0, t0, t_end, rng, [&](double t, const Eigen::VectorXd& x) {
    traj.times.push_back(t);
    traj.counts.push_back(x);
  });
  return traj;
}

std::vector<Eigen::VectorXd> gillespie_sample_at(const ReactionNetwork& net,
                                                 const Eigen::VectorXd& theta,
                                                 const Eigen::VectorXd& s0, double t0,
                                                 const std::vector<double>& times,
                                                 RngStream& rng) {
  if (times.empty()) return {};
  check_initial(net, s0, t0, times.back());
  std::vector<Eigen::VectorXd> out;
  out.reserve(times.size());
  Eigen::VectorXd prev = (s0 * net.system_size()).array().round().matrix();
  std::size_t next = 0;
  auto flush_up_to = [&](double t, const Eigen::VectorXd& state_before) {
    while (next < times.size() && times[next] < t) {
      out.push_back(state_before / net.system_size());
      ++next;
    }
  };
  run_ssa(net, theta, s0, t0, times.back(), rng, [&](double t, const Eigen::VectorXd& x) {
    flush_up_to(t, prev);
    prev = x;
  });
  while (next < times.size()) {
    out.push_back(prev / net.system_size());
    ++next;
  }
  return out;
}

}  // namespace srnbayes
