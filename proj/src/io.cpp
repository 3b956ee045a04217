#include "srnbayes/io/io.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "srnbayes/error.hpp"

namespace srnbayes {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string jump_trajectory_csv(const JumpTrajectory& traj, int trajectory_id,
                                const std::vector<std::string>& species_names) {
  std::string out = "trajectory_id,time,species,value\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    for (Eigen::Index j = 0; j < traj.counts[i].size(); ++j) {
      out += std::to_string(trajectory_id) + "," + format_double(traj.times[i]) + "," +
             species_names[static_cast<std::size_t>(j)] + "," +
             format_double(traj.counts[i](j) / traj.omega) + "\n";
    }
  }
  return out;
}

std::string observations_csv(const ObservationSet& data) {
  std::string out = "trajectory_id,time,species,value\n";
  for (const auto& traj : data.trajectories) {
    for (const auto& obs : traj.points) {
      for (std::size_t r = 0; r < obs.observed.size(); ++r) {
        out += std::to_string(traj.id) + "," + format_double(obs.time) + "," +
               std::to_string(obs.observed[r]) + "," +
               format_double(obs.values(static_cast<Eigen::Index>(r))) + "\n";
      }
    }
  }
  return out;
}

nlohmann::ordered_json observation_set_to_json(const ObservationSet& data) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["schedule"] = nlohmann::ordered_json::array();
  if (!data.trajectories.empty()) {
    for (const auto& obs : data.trajectories.front().points) {
      nlohmann::ordered_json pt;
      pt["time"] = obs.time;
      pt["observed"] = obs.observed;
      std::vector<double> sd(obs.noise_sd.data(), obs.noise_sd.data() + obs.noise_sd.size());
      pt["noise_sd"] = sd;
      j["schedule"].push_back(pt);
    }
  }
  j["trajectories"] = nlohmann::ordered_json::array();
  for (const auto& traj : data.trajectories) {
    nlohmann::ordered_json tj;
    tj["id"] = traj.id;
    tj["values"] = nlohmann::ordered_json::array();
    for (const auto& obs : traj.points) {
      std::vector<double> v(obs.values.data(), obs.values.data() + obs.values.size());
      tj["values"].push_back(v);
    }
    j["trajectories"].push_back(tj);
  }
  return j;
}

ObservationSet observation_set_from_json(const nlohmann::json& j) {
  ObservationSet data;
  std::vector<Observation> schedule;
  for (const auto& pt : j.at("schedule")) {
    Observation obs;
    obs.time = pt.at("time").get<double>();
    obs.observed = pt.at("observed").get<std::vector<int>>();
    const auto sd = pt.at("noise_sd").get<std::vector<double>>();
    obs.noise_sd = Eigen::Map<const Eigen::VectorXd>(sd.data(),
                                                     static_cast<Eigen::Index>(sd.size()));
    schedule.push_back(std::move(obs));
  }
  for (const auto& tj : j.at("trajectories")) {
    ObservedTrajectory traj;
    traj.id = tj.at("id").get<int>();
    const auto& values = tj.at("values");
    if (values.size() != schedule.size()) {
      throw ConfigError("trajectories.values", "length != schedule length");
    }
    for (std::size_t h = 0; h < values.size(); ++h) {
      Observation obs = schedule[h];
      const auto v = values[h].get<std::vector<double>>();
      if (v.size() != obs.observed.size()) {
        throw ConfigError("trajectories.values", "component count mismatch");
      }
      obs.values = Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                     static_cast<Eigen::Index>(v.size()));
      traj.points.push_back(std::move(obs));
    }
    data.trajectories.push_back(std::move(traj));
  }
  return data;
}

std::string bands_csv(const TrajectoryBands& bands,
                      const std::vector<std::string>& species_names) {
  std::string out = "time,species,mean,lo95,hi95\n";
  for (std::size_t g = 0; g < bands.times.size(); ++g) {
    for (Eigen::Index j = 0; j < bands.mean.cols(); ++j) {
      out += format_double(bands.times[g]) + "," + species_names[static_cast<std::size_t>(j)] +
             "," + format_double(bands.mean(static_cast<Eigen::Index>(g), j)) + "," +
             format_double(bands.lo95(static_cast<Eigen::Index>(g), j)) + "," +
             format_double(bands.hi95(static_cast<Eigen::Index>(g), j)) + "\n";
    }
  }
  return out;
}

std::string samples_csv_header() { return "replicate_id,sample_id,param,value\n"; }

void append_samples_csv(std::string& out, int replicate, const Eigen::MatrixXd& samples,
                        const std::vector<std::string>& param_names) {
  for (Eigen::Index b = 0; b < samples.rows(); ++b) {
    for (Eigen::Index k = 0; k < samples.cols(); ++k) {
      out += std::to_string(replicate) + "," + std::to_string(b) + "," +
             param_names[static_cast<std::size_t>(k)] + "," + format_double(samples(b, k)) +
             "\n";
    }
  }
}

nlohmann::ordered_json gaussian_posterior_to_json(const GaussianPosterior& gp) {
  nlohmann::ordered_json j;
  std::vector<double> mode(gp.mode.data(), gp.mode.data() + gp.mode.size());
  j["mode"] = mode;
  j["covariance"] = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < gp.cov.rows(); ++r) {
    std::vector<double> row(gp.cov.cols());
    for (Eigen::Index c = 0; c < gp.cov.cols(); ++c) row[static_cast<std::size_t>(c)] = gp.cov(r, c);
    j["covariance"].push_back(row);
  }
  j["lambda_max"] = gp.lambda_max;
  j["N1"] = gp.n1;
  j["N2"] = gp.n2;
  j["converged"] = gp.converged_mode && gp.converged_cov;
  j["grad_evals"] = gp.grad_evals;
  j["hess_evals"] = gp.hess_evals;
  return j;
}

}  // namespace srnbayes
