#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "srnbayes/error.hpp"
#include "srnbayes/exp/experiment_config.hpp"
#include "srnbayes/samplers/gaussian_fit.hpp"

namespace srnbayes {

class AllReplicationsFailed : public std::runtime_error {
 public:
  explicit AllReplicationsFailed(const std::string& what) : std::runtime_error(what) {}
};

struct ReplicationResult {
  int rep = 0;
  bool solved = false;
  std::string failure;
  Eigen::MatrixXd samples;  // (B, free dim), original scale
  std::optional<GaussianPosterior> posterior;
  Eigen::VectorXd rmse;     // per free parameter
  double wall_seconds = 0.0;
  long target_evals = 0;
  long n1 = 0, n2 = 0;
  double lambda_max = 0.0;
  double acceptance_rate = 0.0;  // mala
};

struct Stat {
  double mean = 0.0;
  double half_ci95 = 0.0;  // 1.96 * SE across replications
  int n = 0;
};

struct MetricsReport {
  std::string case_name;
  std::string sampler;
  int H = 0;
  double c = 0.0;
  int replications = 0;
  int solved = 0;
  int failed = 0;
  std::vector<std::pair<std::string, Stat>> rmse;  // per free parameter
  std::optional<Stat> lambda_max;
  std::optional<Stat> n1;
  std::optional<Stat> n2;
  std::vector<double> wall_seconds;  // per replication (written to timing.json only)
};

struct RunOptions {
  int workers = 1;
  std::string out_dir;  // empty: no artifact files
};

/// Forward simulator used by the ABC samplers: jump simulation plus
/// simulated measurement error, generated exactly like the observed data.
std::function<ObservationSet(const Eigen::VectorXd&, RngStream&)> make_abc_simulator(
    const ExperimentConfig& cfg);

/// Generates one replication's synthetic dataset (initial draw, jump
/// simulation, observation). Streams are derived from (seed, rep) so results
/// do not depend on scheduling.
ObservationSet generate_data(const ExperimentConfig& cfg, int rep);

/// Runs the configured sampler against one replication's data; when
/// external_data is given, the data-generation step is skipped.
ReplicationResult run_replication(const ExperimentConfig& cfg, int rep,
                                  const ObservationSet* external_data = nullptr);

/// Full macro-replication experiment: data generation, inference, RMSE
/// aggregation with 95% CIs, artifact export (samples.csv, report.json,
/// posteriors.json, timing.json). Throws AllReplicationsFailed when no
/// replication produced samples.
MetricsReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts,
                             std::vector<ReplicationResult>* results_out = nullptr);

/// Single-dataset inference on externally supplied observations.
MetricsReport run_experiment_on_data(const ExperimentConfig& cfg, const ObservationSet& data,
                                     const RunOptions& opts,
                                     std::vector<ReplicationResult>* results_out = nullptr);

/// Loads a case preset, applies overrides, and delegates to run_experiment.
struct ReproduceOverrides {
  std::optional<int> H;
  std::optional<double> c;
  std::optional<std::string> sampler;
  std::optional<int> replications;
  std::optional<std::uint64_t> seed;
};
MetricsReport reproduce(const std::string& case_name, const ReproduceOverrides& overrides,
                        const RunOptions& opts);

nlohmann::ordered_json report_to_json(const MetricsReport& report);

}  // namespace srnbayes
