#include "srnbayes/model/reaction_network.hpp"

#include <stdexcept>
#include <string>

#include "srnbayes/error.hpp"

namespace srnbayes {

ReactionNetwork::ReactionNetwork(Eigen::MatrixXd stoichiometry, std::vector<RateLaw> rate_laws,
                                 double system_size, std::vector<std::string> species_names)
    : stoich_(std::move(stoichiometry)),
      laws_(std::move(rate_laws)),
      omega_(system_size),
      names_(std::move(species_names)) {
  if (stoich_.rows() < 1 || stoich_.cols() < 1) {
    throw DimensionMismatch("ReactionNetwork: empty stoichiometry");
  }
  if (static_cast<Eigen::Index>(laws_.size()) != stoich_.cols()) {
    throw DimensionMismatch("ReactionNetwork: rate law count != reaction count");
  }
  if (omega_ <= 0.0) throw std::invalid_argument("ReactionNetwork: system size must be > 0");
  for (const auto& law : laws_) {
    if (rate_law_max_species(law) >= num_species()) {
      throw DimensionMismatch("ReactionNetwork: rate law references invalid species index");
    }
  }
  if (names_.empty()) {
    for (int j = 0; j < num_species(); ++j) names_.push_back("species_" + std::to_string(j));
  }
  outer_.reserve(laws_.size());
  for (Eigen::Index k = 0; k < stoich_.cols(); ++k) {
    outer_.push_back(stoich_.col(k) * stoich_.col(k).transpose());
  }
}

Eigen::VectorXd ReactionNetwork::clamped(const Eigen::VectorXd& s) const {
  if (s.size() != num_species()) throw DimensionMismatch("ReactionNetwork: state dimension");
  if ((s.array() < -kStateTolerance).any()) {
    throw StateDomainError("ReactionNetwork: state negative beyond tolerance");
  }
  return s.cwiseMax(0.0);
}

Eigen::VectorXd ReactionNetwork::eval_rates(const Eigen::VectorXd& s,
                                            const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd sc = clamped(s);
  Eigen::VectorXd v(num_reactions());
  eval_rates_into(sc, theta, v);
  return v;
}

void ReactionNetwork::eval_rates_into(const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
                                      Eigen::VectorXd& v) const {
  v.resize(num_reactions());
  for (int k = 0; k < num_reactions(); ++k) v(k) = rate_value(laws_[k], s, theta);
}

Eigen::VectorXd ReactionNetwork::drift(const Eigen::VectorXd& s,
                                       const Eigen::VectorXd& theta) const {
  return stoich_ * eval_rates(s, theta);
}

Eigen::MatrixXd ReactionNetwork::diffusion_matrix(const Eigen::VectorXd& s,
                                                  const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd v = eval_rates(s, theta);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(num_species(), num_species());
  for (int k = 0; k < num_reactions(); ++k) D += v(k) * outer_[k];
  return D / omega_;
}

Eigen::MatrixXd ReactionNetwork::rate_state_jacobian(const Eigen::VectorXd& s,
                                                     const Eigen::VectorXd& theta) const {
  const Eigen::VectorXd sc = clamped(s);
  Eigen::MatrixXd F(num_species(), num_species());
  Eigen::RowVectorXd row(num_species());
  jacobian_into(sc, theta, F, row);
  return F;
}

void ReactionNetwork::jacobian_into(const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
                                    Eigen::MatrixXd& F, Eigen::RowVectorXd& scratch_row) const {
  F.setZero(num_species(), num_species());
  for (int k = 0; k < num_reactions(); ++k) {
    rate_state_partials(laws_[k], s, theta, scratch_row);
    // F += C_k * dv_k/ds (rank-1); columns touched are the nonzero partials.
    for (int j = 0; j < num_species(); ++j) {
      const double d = scratch_row(j);
      if (d != 0.0) F.col(j) += d * stoich_.col(k);
    }
  }
}

}  // namespace srnbayes
