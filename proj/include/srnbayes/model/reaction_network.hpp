#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "srnbayes/model/rate_law.hpp"

namespace srnbayes {

/// States entering rate laws may be negative by at most this much; such
/// components are clamped to 0 before evaluation.
constexpr double kStateTolerance = 1e-9;

/// Immutable reaction-network definition: stoichiometry C (N_s x N_r), one
/// rate law per reaction, and the system size Omega linking counts and
/// concentrations (counts = Omega * concentration).
class ReactionNetwork {
 public:
  ReactionNetwork(Eigen::MatrixXd stoichiometry, std::vector<RateLaw> rate_laws,
                  double system_size = 1.0, std::vector<std::string> species_names = {});

  int num_species() const { return static_cast<int>(stoich_.rows()); }
  int num_reactions() const { return static_cast<int>(stoich_.cols()); }
  double system_size() const { return omega_; }
  const Eigen::MatrixXd& stoichiometry() const { return stoich_; }
  const std::vector<RateLaw>& rate_laws() const { return laws_; }
  const std::vector<std::string>& species_names() const { return names_; }

  /// v(s; theta) per reaction; s is clamped at 0 within kStateTolerance and a
  /// state more negative than that raises StateDomainError.
  Eigen::VectorXd eval_rates(const Eigen::VectorXd& s, const Eigen::VectorXd& theta) const;

  /// C v(s; theta).
  Eigen::VectorXd drift(const Eigen::VectorXd& s, const Eigen::VectorXd& theta) const;

  /// Omega^{-1} C diag(v) C^T (the full covariance rate of the diffusion).
  Eigen::MatrixXd diffusion_matrix(const Eigen::VectorXd& s, const Eigen::VectorXd& theta) const;

  /// Analytic Jacobian of the drift: d(C v)/ds, N_s x N_s.
  Eigen::MatrixXd rate_state_jacobian(const Eigen::VectorXd& s,
                                      const Eigen::VectorXd& theta) const;

  // Allocation-free variants for tight filter loops. `s` must already be
  // clamped nonnegative.
  void eval_rates_into(const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
                       Eigen::VectorXd& v) const;
  void jacobian_into(const Eigen::VectorXd& s, const Eigen::VectorXd& theta,
                     Eigen::MatrixXd& F, Eigen::RowVectorXd& scratch_row) const;

  /// Per-reaction outer products C_k C_k^T, so that
  /// C diag(v) C^T = sum_k v_k outer(k).
  const std::vector<Eigen::MatrixXd>& stoich_outer() const { return outer_; }

 private:
  Eigen::VectorXd clamped(const Eigen::VectorXd& s) const;

  Eigen::MatrixXd stoich_;
  std::vector<RateLaw> laws_;
  double omega_;
  std::vector<std::string> names_;
  std::vector<Eigen::MatrixXd> outer_;
};

}  // namespace srnbayes
