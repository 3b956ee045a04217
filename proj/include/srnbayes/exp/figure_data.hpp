#pragma once

#include <string>
#include <vector>

#include "srnbayes/exp/experiment_config.hpp"

namespace srnbayes {

/// Plot-ready long-format CSVs; no plotting here.
///
/// diffusion_compare: one jump path against the mean of `em_replicates`
/// diffusion paths for each step size, on the coarsest common grid.
/// Columns: dt,time,gillespie_prey,em_mean_prey (first species).
std::string diffusion_compare_csv(const ExperimentConfig& cfg, const std::vector<double>& dts,
                                  int em_replicates, double t_end, std::uint64_t seed);

/// trajectory_bands: runs one replication (data + configured Gaussian-fit
/// sampler), then filters posterior draws onto a grid.
/// Files written: bands.csv, observations.csv, truth.csv under out_dir.
void emit_trajectory_bands(const ExperimentConfig& cfg, int grid_points, int num_draws,
                           const std::string& out_dir);

/// violin: log-parameter posterior samples per (sampler, H).
/// Columns: sampler,H,param,sample_id,log_value.
std::string violin_csv(const ExperimentConfig& cfg, const std::vector<std::string>& samplers,
                       const std::vector<int>& h_values);

}  // namespace srnbayes
