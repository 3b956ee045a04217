#pragma once

#include <Eigen/Dense>
#include <utility>
#include <variant>
#include <vector>

namespace srnbayes {

/// v = theta[param] * prod_j s_j^multiplicity_j. An empty reactant list gives
/// a constant (zeroth-order) rate theta[param].
struct MassAction {
  std::vector<std::pair<int, int>> reactants;  // (species index, multiplicity)
  int param = 0;
};

/// Dimerization kinetics v = 0.5 * theta[param] * s * (s - 1), clamped at 0
/// for fractional s in (0, 1) where the count formula would go negative.
struct CombinatorialMassAction {
  int species = 0;
  int param = 0;
};

/// v = theta[param] * max(zeta - s, 0): rate on the complement of a conserved
/// total (e.g. the bound fraction of a fixed gene copy number).
struct ConservedComplement {
  int species = 0;
  double zeta = 0.0;
  int param = 0;
};

/// v = theta[vmax_param] * prod_f s_f / (theta[km_param_f] + s_f).
struct MichaelisMenten {
  int vmax_param = 0;
  std::vector<std::pair<int, int>> factors;  // (species index, Km param index)
};

using RateLaw =
    std::variant<MassAction, CombinatorialMassAction, ConservedComplement, MichaelisMenten>;

/// Rate value at a nonnegative state; theta is the full parameter vector on
/// the original (constrained) scale.
double rate_value(const RateLaw& law, const Eigen::VectorXd& s, const Eigen::VectorXd& theta);

/// Accumulates the analytic partials dv/ds_j into row (length N_s).
void rate_state_partials(const RateLaw& law, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& theta, Eigen::RowVectorXd& row);

/// Largest parameter index referenced (-1 if none); used for validation.
int rate_law_max_param(const RateLaw& law);
int rate_law_max_species(const RateLaw& law);

}  // namespace srnbayes
