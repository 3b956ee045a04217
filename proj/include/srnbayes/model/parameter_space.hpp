#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "srnbayes/numerics/rng.hpp"

namespace srnbayes {

enum class Transform { Identity, Log, Logit };

struct Prior {
  enum class Type { Uniform, Gaussian };
  Type type = Type::Uniform;
  double a = 0.0, b = 1.0;   // uniform bounds
  double mu = 0.0, sd = 1.0; // gaussian

  double log_density(double theta) const;
  double sample(RngStream& rng) const;
};

struct ParamSpec {
  std::string name;
  Transform transform = Transform::Log;
  double lo = 0.0, hi = 1.0;  // logit bounds
  Prior prior;
  std::optional<double> fixed;  // fixed parameters are excluded from inference
};

/// Parameter transforms and priors. Samplers work on the unconstrained scale
/// phi (free parameters only); constrained values appear at rate evaluation
/// and reporting. log_prior_unconstrained includes the change-of-variables
/// Jacobian and returns -inf outside the mapped prior support.
class ParameterSpace {
 public:
  explicit ParameterSpace(std::vector<ParamSpec> specs);

  int free_dim() const { return static_cast<int>(free_.size()); }
  int total_dim() const { return static_cast<int>(specs_.size()); }
  const std::vector<ParamSpec>& specs() const { return specs_; }
  const ParamSpec& free_spec(int k) const { return specs_[free_[k]]; }
  std::vector<std::string> free_names() const;
  int index_of(const std::string& name) const;  // index into the full vector

  Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& theta_free) const;
  Eigen::VectorXd to_constrained(const Eigen::VectorXd& phi) const;
  double log_prior_unconstrained(const Eigen::VectorXd& phi) const;

  /// Prior density on the original scale (no Jacobian); used by ABC.
  double log_prior_constrained(const Eigen::VectorXd& theta_free) const;
  bool in_support(const Eigen::VectorXd& theta_free) const;

  /// Full parameter vector (fixed slots filled) from free constrained values.
  Eigen::VectorXd full_params(const Eigen::VectorXd& theta_free) const;
  Eigen::VectorXd full_params_unconstrained(const Eigen::VectorXd& phi) const;
  Eigen::VectorXd true_values_free(const Eigen::VectorXd& full_true) const;

  /// Draw free parameters from the prior, constrained scale.
  Eigen::VectorXd draw_prior_free(RngStream& rng) const;

 private:
  std::vector<ParamSpec> specs_;
  std::vector<int> free_;  // spec index per free slot
};

}  // namespace srnbayes
