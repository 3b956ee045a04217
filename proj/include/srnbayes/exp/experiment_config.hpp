#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "srnbayes/lna/filter.hpp"
#include "srnbayes/model/parameter_space.hpp"
#include "srnbayes/model/reaction_network.hpp"
#include "srnbayes/samplers/gaussian_fit.hpp"

namespace srnbayes {

struct ObservationSpec {
  double t0 = 0.0;
  int H = 1;                     // number of observation intervals (H+1 points)
  std::optional<double> dt;      // fixed spacing: span grows with H
  std::optional<double> t_end;   // fixed span: spacing = (t_end - t0) / H
  std::vector<int> observed;

  double spacing() const;
  double span_end() const;
  std::vector<double> times() const;
};

struct InitialStateSpec {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;   // zero matrix for a deterministic start
  bool random = false;
  bool round = true;     // round to nearest nonnegative integer counts
};

struct TargetSpec {
  enum class Type { Filter, DenseTransition, Quadratic };
  Type type = Type::Filter;
  int substeps = 50;               // ODE substeps per observation interval
  Eigen::VectorXd quad_mu;         // quadratic synthetic target
  Eigen::MatrixXd quad_precision;
};

struct SamplerSpec {
  std::string type = "two-stage";
  SamplerConfig cfg;
  Eigen::MatrixXd psi0;                          // empty = identity
  std::vector<double> abc_schedule;              // explicit schedule
  std::map<int, std::vector<double>> abc_schedules_by_h;
  Eigen::VectorXd abc_kernel_sd;                 // empty = 5%-of-range default
  double abc_epsilon = 0.0;                      // abc-rejection threshold
  long budget_evals = 0;                         // >0: cap ULA/MALA by target evals
};

/// One experiment: model, priors plus truth, observation design, likelihood
/// target, sampler, and the macro-replication plan.
struct ExperimentConfig {
  int version = 1;
  std::string name;
  std::shared_ptr<const ReactionNetwork> network;  // null for quadratic targets
  std::shared_ptr<const ParameterSpace> params;
  Eigen::VectorXd true_full;  // full parameter vector used to generate data
  NoiseModel noise;
  ObservationSpec observation;
  InitialStateSpec initial_state;
  LnaMoments initial_moments;
  TargetSpec target;
  SamplerSpec sampler;
  std::map<std::string, SamplerSpec> sampler_presets;  // per sampler type
  int replications = 20;
  std::uint64_t seed = 1;

  /// Switch the active sampler, folding in its per-type preset when present.
  void select_sampler(const std::string& type);
  /// Re-derive the observation design for a different H (ABC schedules too).
  void set_h(int H);
};

ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

/// Built-in case-study presets ("enzyme", "lotka", "genenet"); the JSON they
/// are parsed from ships under configs/.
ExperimentConfig load_preset(const std::string& case_name);
std::vector<std::string> preset_names();

}  // namespace srnbayes
