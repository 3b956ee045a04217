#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "srnbayes/lna/trajectory_bands.hpp"
#include "srnbayes/samplers/gaussian_fit.hpp"
#include "srnbayes/sim/gillespie.hpp"
#include "srnbayes/sim/observe.hpp"

namespace srnbayes {

/// Shortest round-trip decimal representation (byte-stable across runs).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);

/// CSV columns: trajectory_id, time, species, value (concentration scale).
std::string jump_trajectory_csv(const JumpTrajectory& traj, int trajectory_id,
                                const std::vector<std::string>& species_names);

/// CSV columns: trajectory_id, time, species, value (observed components).
std::string observations_csv(const ObservationSet& data);

/// JSON envelope: schedule (times, observed indices, noise sd) + values.
nlohmann::ordered_json observation_set_to_json(const ObservationSet& data);
ObservationSet observation_set_from_json(const nlohmann::json& j);

/// CSV columns: time, species, mean, lo95, hi95.
std::string bands_csv(const TrajectoryBands& bands, const std::vector<std::string>& species_names);

/// CSV columns: replicate_id, sample_id, param, value (original scale).
std::string samples_csv_header();
void append_samples_csv(std::string& out, int replicate, const Eigen::MatrixXd& samples,
                        const std::vector<std::string>& param_names);

nlohmann::ordered_json gaussian_posterior_to_json(const GaussianPosterior& gp);

}  // namespace srnbayes
