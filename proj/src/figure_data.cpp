#include "srnbayes/exp/figure_data.hpp"

#include <cmath>
#include <filesystem>

#include "srnbayes/exp/experiment.hpp"
#include "srnbayes/io/io.hpp"
#include "srnbayes/numerics/linalg.hpp"
#include "srnbayes/lna/trajectory_bands.hpp"
#include "srnbayes/sim/euler_maruyama.hpp"

namespace srnbayes {

std::string diffusion_compare_csv(const ExperimentConfig& cfg, const std::vector<double>& dts,
                                  int em_replicates, double t_end, std::uint64_t seed) {
  const auto& net = *cfg.network;
  const Eigen::VectorXd s0 = cfg.initial_state.mean;
  RngStream jump_rng(seed, 0);
  const JumpTrajectory truth = gillespie(net, cfg.true_full, s0, 0.0, t_end, jump_rng);

  std::string out = "dt,time,gillespie_prey,em_mean_prey\n";
  for (std::size_t di = 0; di < dts.size(); ++di) {
    const double dt = dts[di];
    const int steps = static_cast<int>(std::round(t_end / dt));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) grid.push_back(i * dt);

    Eigen::VectorXd mean_prey = Eigen::VectorXd::Zero(steps + 1);
    for (int rep = 0; rep < em_replicates; ++rep) {
      RngStream em_rng(seed, 1000 + di * 1000 + static_cast<std::uint64_t>(rep));
      const auto path = euler_maruyama(net, cfg.true_full, s0, grid, em_rng);
      for (int i = 0; i <= steps; ++i) mean_prey(i) += path[static_cast<std::size_t>(i)](0);
    }
    mean_prey /= em_replicates;

    for (int i = 0; i <= steps; ++i) {
      out += format_double(dt) + "," + format_double(grid[static_cast<std::size_t>(i)]) + "," +
             format_double(truth.concentration_at(grid[static_cast<std::size_t>(i)])(0)) + "," +
             format_double(mean_prey(i)) + "\n";
    }
  }
  return out;
}

void emit_trajectory_bands(const ExperimentConfig& cfg, int grid_points, int num_draws,
                           const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  // One replication's data and posterior samples, then the inferred bands.
  ExperimentConfig one = cfg;
  one.replications = 1;
  std::vector<ReplicationResult> results;
  run_experiment(one, RunOptions{1, ""}, &results);
  const auto& rep = results.front();

  RngStream data_rng(cfg.seed, 1);  // regenerate the same truth path
  RngStream init_rng(cfg.seed, 0);
  Eigen::VectorXd s0 = cfg.initial_state.mean;
  if (cfg.initial_state.random) s0 = mvn_sample(init_rng, s0, cfg.initial_state.cov);
  if (cfg.initial_state.round) {
    s0 = (s0 * cfg.network->system_size()).array().round().matrix() / cfg.network->system_size();
  }
  s0 = s0.cwiseMax(0.0);
  const JumpTrajectory truth = gillespie(*cfg.network, cfg.true_full, s0, cfg.observation.t0,
                                         cfg.observation.span_end(), data_rng);
  const ObservationSet data = generate_data(cfg, 0);

  std::vector<double> grid;
  const double span = cfg.observation.span_end() - cfg.observation.t0;
  for (int i = 0; i <= grid_points; ++i) {
    grid.push_back(cfg.observation.t0 + span * i / grid_points);
  }

  RngStream band_rng(cfg.seed, 3);
  const TrajectoryBands bands =
      infer_trajectory(*cfg.network, *cfg.params, cfg.noise, rep.samples,
                       data.trajectories.front(), grid, num_draws, cfg.initial_moments,
                       cfg.target.substeps, band_rng);

  write_text_file(out_dir + "/bands.csv", bands_csv(bands, cfg.network->species_names()));
  write_text_file(out_dir + "/observations.csv", observations_csv(data));
  write_text_file(out_dir + "/truth.csv",
                  jump_trajectory_csv(truth, 0, cfg.network->species_names()));
}

std::string violin_csv(const ExperimentConfig& cfg, const std::vector<std::string>& samplers,
                       const std::vector<int>& h_values) {
  std::string out = "sampler,H,param,sample_id,log_value\n";
  const auto names = cfg.params->free_names();
  for (const int H : h_values) {
    for (const auto& sampler : samplers) {
      ExperimentConfig run_cfg = cfg;
      run_cfg.select_sampler(sampler);
      run_cfg.set_h(H);
      run_cfg.replications = 1;
      std::vector<ReplicationResult> results;
      run_experiment(run_cfg, RunOptions{1, ""}, &results);
      const auto& rep = results.front();
      if (!rep.solved) continue;
      for (Eigen::Index b = 0; b < rep.samples.rows(); ++b) {
        for (std::size_t k = 0; k < names.size(); ++k) {
          out += sampler + "," + std::to_string(H) + "," + names[k] + "," + std::to_string(b) +
                 "," + format_double(std::log(rep.samples(b, static_cast<Eigen::Index>(k)))) +
                 "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace srnbayes
