#pragma once

#include <Eigen/Dense>
#include <vector>

#include "srnbayes/model/reaction_network.hpp"
#include "srnbayes/numerics/rng.hpp"

namespace srnbayes {

/// Euler-Maruyama discretization of the diffusion approximation on the given
/// (increasing) time grid: s' = s + C v dt + chol(Omega^-1 C diag(v) C^T dt) z,
/// with states clamped at 0 after each step. Returns one state per grid time
/// (the first entry is s0). Throws IntegrationDiverged if any state exceeds
/// 1e12 in magnitude.
std::vector<Eigen::VectorXd> euler_maruyama(const ReactionNetwork& net,
                                            const Eigen::VectorXd& theta,
                                            const Eigen::VectorXd& s0,
                                            const std::vector<double>& times, RngStream& rng);

}  // namespace srnbayes
