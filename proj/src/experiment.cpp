#include "srnbayes/exp/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

#include "srnbayes/io/io.hpp"
#include "srnbayes/numerics/linalg.hpp"
#include "srnbayes/samplers/abc.hpp"
#include "srnbayes/samplers/langevin.hpp"

namespace srnbayes {

namespace {

// Stream-id layout: one block of ids per replication, one lane per purpose.
constexpr std::uint64_t kStreamsPerRep = 8;
enum StreamLane : std::uint64_t { kLaneInit = 0, kLaneData = 1, kLaneSampler = 2, kLaneBands = 3 };

RngStream rep_stream(const ExperimentConfig& cfg, int rep, StreamLane lane) {
  return RngStream(cfg.seed, static_cast<std::uint64_t>(rep) * kStreamsPerRep + lane);
}

Eigen::VectorXd draw_initial_state(const ExperimentConfig& cfg, RngStream& rng) {
  Eigen::VectorXd s0 = cfg.initial_state.mean;
  if (cfg.initial_state.random) {
    s0 = mvn_sample(rng, cfg.initial_state.mean, cfg.initial_state.cov);
  }
  if (cfg.initial_state.round) {
    s0 = (s0 * cfg.network->system_size()).array().round().matrix() /
         cfg.network->system_size();
  }
  return s0.cwiseMax(0.0);
}

Schedule build_schedule(const ExperimentConfig& cfg) {
  const auto times = cfg.observation.times();
  Schedule schedule;
  schedule.reserve(times.size());
  Eigen::VectorXd sd(static_cast<Eigen::Index>(cfg.observation.observed.size()));
  for (std::size_t r = 0; r < cfg.observation.observed.size(); ++r) {
    sd(static_cast<Eigen::Index>(r)) =
        cfg.noise.sd_for(cfg.observation.observed[r], cfg.true_full);
  }
  for (const double t : times) {
    schedule.push_back({t, cfg.observation.observed, sd});
  }
  return schedule;
}

double quadratic_target(const ExperimentConfig& cfg, const Eigen::VectorXd& phi) {
  const Eigen::VectorXd d = phi - cfg.target.quad_mu;
  return -0.5 * d.dot(cfg.target.quad_precision * d);
}

std::vector<double> abc_schedule_for(const ExperimentConfig& cfg) {
  const auto& spec = cfg.sampler;
  const auto it = spec.abc_schedules_by_h.find(cfg.observation.H);
  if (it != spec.abc_schedules_by_h.end()) return it->second;
  if (!spec.abc_schedule.empty()) return spec.abc_schedule;
  throw ConfigError("samplers." + spec.type + ".schedule",
                    "no schedule for H=" + std::to_string(cfg.observation.H));
}

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  s.n = static_cast<int>(xs.size());
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.half_ci95 = 1.96 * std::sqrt(ss / (s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

void write_artifacts(const ExperimentConfig& cfg, const MetricsReport& report,
                     const std::vector<ReplicationResult>& results, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto names = cfg.params->free_names();

  std::string csv = samples_csv_header();
  for (const auto& r : results) {
    if (r.solved) append_samples_csv(csv, r.rep, r.samples, names);
  }
  write_text_file(out_dir + "/samples.csv", csv);

  write_text_file(out_dir + "/report.json", report_to_json(report).dump(2) + "\n");

  nlohmann::ordered_json posteriors = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    if (r.posterior) {
      nlohmann::ordered_json pj = gaussian_posterior_to_json(*r.posterior);
      pj["replicate"] = r.rep;
      posteriors.push_back(pj);
    }
  }
  if (!posteriors.empty()) {
    write_text_file(out_dir + "/posteriors.json", posteriors.dump(2) + "\n");
  }

  // Wall-clock lives in its own file so every other artifact is byte-stable
  // for a fixed seed.
  nlohmann::ordered_json timing;
  timing["per_replication_seconds"] = report.wall_seconds;
  write_text_file(out_dir + "/timing.json", timing.dump(2) + "\n");
}

}  // namespace

std::function<ObservationSet(const Eigen::VectorXd&, RngStream&)> make_abc_simulator(
    const ExperimentConfig& cfg) {
  return [&cfg](const Eigen::VectorXd& theta_free, RngStream& rng) {
    ObservationSet sim;
    const Eigen::VectorXd full = cfg.params->full_params(theta_free);
    Eigen::VectorXd s0 = cfg.initial_state.mean;
    if (cfg.initial_state.random) s0 = mvn_sample(rng, s0, cfg.initial_state.cov);
    if (cfg.initial_state.round) {
      s0 = (s0 * cfg.network->system_size()).array().round().matrix() /
           cfg.network->system_size();
    }
    s0 = s0.cwiseMax(0.0);
    const auto times = cfg.observation.times();
    const auto states = gillespie_sample_at(*cfg.network, full, s0, cfg.observation.t0, times,
                                            rng);
    ObservedTrajectory traj;
    traj.id = 0;
    for (std::size_t h = 0; h < times.size(); ++h) {
      Observation obs;
      obs.time = times[h];
      obs.observed = cfg.observation.observed;
      obs.noise_sd = cfg.noise.sd_vector(cfg.observation.observed, full);
      obs.values.resize(static_cast<Eigen::Index>(obs.observed.size()));
      for (std::size_t r = 0; r < obs.observed.size(); ++r) {
        const double sd = obs.noise_sd(static_cast<Eigen::Index>(r));
        obs.values(static_cast<Eigen::Index>(r)) =
            states[h](obs.observed[r]) + (sd > 0.0 ? sd * rng.normal() : 0.0);
      }
      traj.points.push_back(std::move(obs));
    }
    sim.trajectories.push_back(std::move(traj));
    return sim;
  };
}

ObservationSet generate_data(const ExperimentConfig& cfg, int rep) {
  RngStream init_rng = rep_stream(cfg, rep, kLaneInit);
  RngStream data_rng = rep_stream(cfg, rep, kLaneData);
  const Eigen::VectorXd s0 = draw_initial_state(cfg, init_rng);
  const Schedule schedule = build_schedule(cfg);
  const JumpTrajectory traj = gillespie(*cfg.network, cfg.true_full, s0, cfg.observation.t0,
                                        cfg.observation.span_end(), data_rng);
  ObservationSet data;
  data.trajectories.push_back(observe(
      [&traj](double t) { return traj.concentration_at(t); }, schedule, data_rng, 0));
  return data;
}

ReplicationResult run_replication(const ExperimentConfig& cfg, int rep,
                                  const ObservationSet* external_data) {
  ReplicationResult out;
  out.rep = rep;
  RngStream sampler_rng = rep_stream(cfg, rep, kLaneSampler);
  const auto& spec = cfg.sampler;
  const auto t_start = std::chrono::steady_clock::now();

  try {
    ObservationSet data;
    std::optional<PosteriorTarget> target;
    if (cfg.target.type == TargetSpec::Type::Quadratic) {
      target.emplace([&cfg](const Eigen::VectorXd& phi) { return quadratic_target(cfg, phi); },
                     static_cast<int>(cfg.target.quad_mu.size()));
    } else {
      data = external_data ? *external_data : generate_data(cfg, rep);
      if (cfg.target.type == TargetSpec::Type::Filter) {
        target.emplace(make_filter_posterior(*cfg.network, *cfg.params, cfg.noise, data,
                                             cfg.initial_moments, cfg.target.substeps));
      } else {
        target.emplace(make_dense_posterior(*cfg.network, *cfg.params, data));
      }
    }

    const Eigen::VectorXd theta_true_free = cfg.params->true_values_free(cfg.true_full);
    const int dim = cfg.params->free_dim();
    SamplerConfig scfg = spec.cfg;
    scfg.seed = cfg.seed;
    const Eigen::MatrixXd psi0 =
        spec.psi0.size() > 0 ? spec.psi0 : Eigen::MatrixXd::Identity(dim, dim);

    auto prior_draw_unconstrained = [&]() {
      return cfg.params->to_unconstrained(cfg.params->draw_prior_free(sampler_rng));
    };

    if (spec.type == "one-stage" || spec.type == "two-stage") {
      const Eigen::VectorXd phi0 = prior_draw_unconstrained();
      GaussianPosterior gp = spec.type == "one-stage"
                                 ? fit_one_stage(*target, scfg, phi0, psi0)
                                 : fit_two_stage(*target, scfg, phi0, psi0);
      if (gp.failed) {
        out.failure = gp.failure;
      } else {
        out.samples = sample_gaussian_posterior(gp, *cfg.params, scfg.num_samples, sampler_rng);
        out.solved = out.samples.allFinite();
        out.n1 = gp.n1;
        out.n2 = gp.n2;
        out.lambda_max = gp.lambda_max;
      }
      out.posterior = std::move(gp);
    } else if (spec.type == "ula") {
      if (spec.budget_evals > 0) {
        // Match a reference sampler's posterior-evaluation budget.
        const long steps = spec.budget_evals / (2 * dim);
        scfg.burn_in = std::max<long>(0, steps - (scfg.num_samples - 1) * scfg.thin - 1);
      }
      const ChainResult chain = ula(*target, scfg, prior_draw_unconstrained(), sampler_rng);
      out.solved = chain.solved;
      out.failure = chain.failure;
      if (chain.solved) {
        out.samples.resize(chain.samples.rows(), dim);
        for (Eigen::Index b = 0; b < chain.samples.rows(); ++b) {
          out.samples.row(b) =
              cfg.params->to_constrained(chain.samples.row(b).transpose()).transpose();
        }
      }
    } else if (spec.type == "mala") {
      GaussianPosterior warm = fit_two_stage(*target, scfg, prior_draw_unconstrained(), psi0);
      if (warm.failed) {
        out.failure = "warm start failed: " + warm.failure;
      } else {
        const ChainResult chain = mala(*target, warm, scfg, sampler_rng);
        out.solved = chain.solved;
        out.failure = chain.failure;
        out.acceptance_rate = chain.acceptance_rate;
        out.n1 = warm.n1;
        out.n2 = warm.n2;
        out.lambda_max = warm.lambda_max;
        out.posterior = std::move(warm);
        if (chain.solved) {
          out.samples.resize(chain.samples.rows(), dim);
          for (Eigen::Index b = 0; b < chain.samples.rows(); ++b) {
            out.samples.row(b) =
                cfg.params->to_constrained(chain.samples.row(b).transpose()).transpose();
          }
        }
      }
    } else if (spec.type == "abc-rejection" || spec.type == "abc-smc") {
      const AbcSimulator simulate = make_abc_simulator(cfg);
      AbcResult abc;
      if (spec.type == "abc-rejection") {
        abc = abc_rejection(simulate, *cfg.params, data, spec.abc_epsilon, scfg.num_samples,
                            sampler_rng);
      } else {
        const Eigen::VectorXd kernel = spec.abc_kernel_sd.size() > 0
                                           ? spec.abc_kernel_sd
                                           : default_abc_kernel_sd(*cfg.params);
        abc = abc_smc(simulate, *cfg.params, data, abc_schedule_for(cfg), kernel,
                      scfg.num_samples, sampler_rng);
      }
      out.solved = abc.solved;
      out.samples = abc.samples;
    } else {
      throw ConfigError("sampler", "unknown sampler type: " + spec.type);
    }

    if (out.solved) {
      out.rmse.resize(dim);
      for (int k = 0; k < dim; ++k) {
        const Eigen::ArrayXd err = out.samples.col(k).array() - theta_true_free(k);
        out.rmse(k) = std::sqrt(err.square().mean());
      }
    }
    out.target_evals = target->eval_count();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    out.solved = false;
    out.failure = e.what();
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return out;
}

MetricsReport run_experiment(const ExperimentConfig& cfg, const RunOptions& opts,
                             std::vector<ReplicationResult>* results_out) {
  const int R = cfg.replications;
  std::vector<ReplicationResult> results(static_cast<std::size_t>(R));

  const int workers = std::max(1, std::min(opts.workers, R));
  if (workers == 1) {
    for (int r = 0; r < R; ++r) results[static_cast<std::size_t>(r)] = run_replication(cfg, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const int r = next.fetch_add(1);
          if (r >= R) break;
          try {
            results[static_cast<std::size_t>(r)] = run_replication(cfg, r);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            break;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  MetricsReport report;
  report.case_name = cfg.name;
  report.sampler = cfg.sampler.type;
  report.H = cfg.observation.H;
  report.c = cfg.sampler.cfg.c;
  report.replications = R;

  const auto names = cfg.params->free_names();
  std::vector<std::vector<double>> rmse_cols(names.size());
  std::vector<double> lmaxs, n1s, n2s;
  for (const auto& r : results) {
    report.wall_seconds.push_back(r.wall_seconds);
    if (!r.solved) {
      ++report.failed;
      continue;
    }
    ++report.solved;
    for (std::size_t k = 0; k < names.size(); ++k) {
      rmse_cols[k].push_back(r.rmse(static_cast<Eigen::Index>(k)));
    }
    if (r.posterior && !r.posterior->failed) {
      lmaxs.push_back(r.lambda_max);
      n1s.push_back(static_cast<double>(r.n1));
      n2s.push_back(static_cast<double>(r.n2));
    }
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    report.rmse.emplace_back(names[k], stat_of(rmse_cols[k]));
  }
  if (!lmaxs.empty()) {
    report.lambda_max = stat_of(lmaxs);
    report.n1 = stat_of(n1s);
    report.n2 = stat_of(n2s);
  }

  if (report.solved == 0) {
    if (!opts.out_dir.empty()) write_artifacts(cfg, report, results, opts.out_dir);
    throw AllReplicationsFailed("all " + std::to_string(R) + " replications failed");
  }
  if (!opts.out_dir.empty()) write_artifacts(cfg, report, results, opts.out_dir);
  if (results_out) *results_out = std::move(results);
  return report;
}

MetricsReport run_experiment_on_data(const ExperimentConfig& cfg, const ObservationSet& data,
                                     const RunOptions& opts,
                                     std::vector<ReplicationResult>* results_out) {
  ExperimentConfig one = cfg;
  one.replications = 1;
  std::vector<ReplicationResult> results{run_replication(one, 0, &data)};

  MetricsReport report;
  report.case_name = one.name;
  report.sampler = one.sampler.type;
  report.H = one.observation.H;
  report.c = one.sampler.cfg.c;
  report.replications = 1;
  report.wall_seconds.push_back(results[0].wall_seconds);
  const auto names = one.params->free_names();
  if (results[0].solved) {
    report.solved = 1;
    for (std::size_t k = 0; k < names.size(); ++k) {
      Stat st;
      st.mean = results[0].rmse(static_cast<Eigen::Index>(k));
      st.n = 1;
      report.rmse.emplace_back(names[k], st);
    }
    if (results[0].posterior && !results[0].posterior->failed) {
      report.lambda_max = Stat{results[0].lambda_max, 0.0, 1};
      report.n1 = Stat{static_cast<double>(results[0].n1), 0.0, 1};
      report.n2 = Stat{static_cast<double>(results[0].n2), 0.0, 1};
    }
  } else {
    report.failed = 1;
  }
  if (!opts.out_dir.empty()) write_artifacts(one, report, results, opts.out_dir);
  if (report.solved == 0) {
    throw AllReplicationsFailed("inference failed: " + results[0].failure);
  }
  if (results_out) *results_out = std::move(results);
  return report;
}

MetricsReport reproduce(const std::string& case_name, const ReproduceOverrides& overrides,
                        const RunOptions& opts) {
  ExperimentConfig cfg = load_preset(case_name);
  if (overrides.sampler) cfg.select_sampler(*overrides.sampler);
  if (overrides.H) cfg.set_h(*overrides.H);
  if (overrides.c) cfg.sampler.cfg.c = *overrides.c;
  if (overrides.replications) cfg.replications = *overrides.replications;
  if (overrides.seed) cfg.seed = *overrides.seed;
  return run_experiment(cfg, opts);
}

nlohmann::ordered_json report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json j;
  j["case"] = report.case_name;
  j["sampler"] = report.sampler;
  j["H"] = report.H;
  j["c"] = report.c;
  j["replications"] = report.replications;
  j["solved"] = report.solved;
  j["failed"] = report.failed;
  nlohmann::ordered_json rmse;
  for (const auto& [name, stat] : report.rmse) {
    rmse[name] = {{"mean", stat.mean}, {"ci95", stat.half_ci95}, {"n", stat.n}};
  }
  j["rmse"] = rmse;
  if (report.lambda_max) {
    j["lambda_max"] = {{"mean", report.lambda_max->mean}, {"ci95", report.lambda_max->half_ci95}};
    j["N1"] = {{"mean", report.n1->mean}, {"ci95", report.n1->half_ci95}};
    j["N2"] = {{"mean", report.n2->mean}, {"ci95", report.n2->half_ci95}};
  }
  return j;
}

}  // namespace srnbayes
