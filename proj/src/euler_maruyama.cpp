#include "srnbayes/sim/euler_maruyama.hpp"

#include <stdexcept>

#include "srnbayes/error.hpp"
#include "srnbayes/numerics/linalg.hpp"

namespace srnbayes {

std::vector<Eigen::VectorXd> euler_maruyama(const ReactionNetwork& net,
                                            const Eigen::VectorXd& theta,
                                            const Eigen::VectorXd& s0,
                                            const std::vector<double>& times, RngStream& rng) {
  if (times.size() < 1) throw std::invalid_argument("euler_maruyama: empty time grid");
  for (std::size_t h = 1; h < times.size(); ++h) {
    if (times[h] <= times[h - 1]) {
      throw std::invalid_argument("euler_maruyama: times must be strictly increasing");
    }
  }

  std::vector<Eigen::VectorXd> path;
  path.reserve(times.size());
  Eigen::VectorXd s = s0.cwiseMax(0.0);
  path.push_back(s);

  const int n = net.num_species();
  Eigen::VectorXd z(n);
  for (std::size_t h = 1; h < times.size(); ++h) {
    const double dt = times[h] - times[h - 1];
    const Eigen::VectorXd v = net.eval_rates(s, theta);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < net.num_reactions(); ++k) cov += v(k) * net.stoich_outer()[k];
    cov *= dt / net.system_size();
    const auto chol = cholesky_psd(cov);
    for (int j = 0; j < n; ++j) z(j) = rng.normal();
    s += net.stoichiometry() * v * dt + chol.L.triangularView<Eigen::Lower>() * z;
    s = s.cwiseMax(0.0);
    if (s.cwiseAbs().maxCoeff() > 1e12 || !s.allFinite()) {
      throw IntegrationDiverged(times[h], "euler_maruyama: state diverged");
    }
    path.push_back(s);
  }
  return path;
}

}  // namespace srnbayes
