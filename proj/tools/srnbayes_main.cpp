// Command-line front end: data simulation, inference, case-study
// reproduction with macro-replication, and plot-data export.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srnbayes/error.hpp"
#include "srnbayes/exp/experiment.hpp"
#include "srnbayes/exp/figure_data.hpp"
#include "srnbayes/io/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitAllFailed = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  int workers = 1;
  std::optional<std::string> sampler;
  std::optional<int> H;
  std::optional<double> c;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_config) {
  if (with_config) cmd->add_option("--config", flags.config_path, "experiment config JSON");
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "base RNG seed");
  cmd->add_option("--reps", flags.reps, "macro-replication count");
  cmd->add_option("--workers", flags.workers, "replication-level worker threads");
  cmd->add_option("--sampler", flags.sampler,
                  "ula | one-stage | two-stage | mala | abc-smc | abc-rejection");
  cmd->add_option("--H", flags.H, "observation interval count");
  cmd->add_option("--c", flags.c, "step-size constant");
}

srnbayes::ExperimentConfig load_config(const CommonFlags& flags, const std::string& preset) {
  srnbayes::ExperimentConfig cfg = flags.config_path.empty()
                                       ? srnbayes::load_preset(preset)
                                       : srnbayes::load_experiment_config(flags.config_path);
  if (flags.sampler) cfg.select_sampler(*flags.sampler);
  if (flags.H) cfg.set_h(*flags.H);
  if (flags.c) cfg.sampler.cfg.c = *flags.c;
  if (flags.reps) cfg.replications = *flags.reps;
  if (flags.seed) cfg.seed = *flags.seed;
  return cfg;
}

void print_report(const srnbayes::MetricsReport& report) {
  std::cout << srnbayes::report_to_json(report).dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian inference toolkit for stochastic reaction networks"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto* sim = app.add_subcommand("simulate", "generate jump trajectories and observations");
  add_common(sim, flags, true);

  auto* infer = app.add_subcommand("infer", "run the configured sampler on a dataset");
  std::string data_path;
  add_common(infer, flags, true);
  infer->add_option("--data", data_path, "observation envelope JSON (default: simulate fresh)");

  auto* repro = app.add_subcommand("reproduce", "run a built-in case study");
  std::string case_name;
  repro->add_option("case", case_name, "enzyme | lotka | genenet")->required();
  add_common(repro, flags, false);

  auto* figure = app.add_subcommand("emit-figure-data", "write plot-ready CSV data");
  std::string kind;
  figure->add_option("kind", kind, "diffusion-compare | trajectory-bands | violin")->required();
  add_common(figure, flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      auto cfg = load_config(flags, "enzyme");
      std::filesystem::create_directories(flags.out_dir);
      srnbayes::ObservationSet all;
      std::string traj_csv;
      for (int r = 0; r < cfg.replications; ++r) {
        auto data = srnbayes::generate_data(cfg, r);
        data.trajectories.front().id = r;
        all.trajectories.push_back(std::move(data.trajectories.front()));
      }
      srnbayes::write_text_file(flags.out_dir + "/observations.csv",
                                srnbayes::observations_csv(all));
      srnbayes::write_text_file(flags.out_dir + "/data.json",
                                srnbayes::observation_set_to_json(all).dump(2) + "\n");
      std::cout << "wrote " << flags.out_dir << "/data.json (" << cfg.replications
                << " trajectories)\n";
      return kExitOk;
    }

    if (infer->parsed()) {
      auto cfg = load_config(flags, "enzyme");
      cfg.replications = 1;
      srnbayes::MetricsReport report;
      std::vector<srnbayes::ReplicationResult> results;
      if (!data_path.empty()) {
        // Inference on a provided dataset: wrap it as a single replication.
        std::ifstream in(data_path);
        if (!in) throw srnbayes::ConfigError("data", "cannot open " + data_path);
        nlohmann::json dj;
        in >> dj;
        const auto data = srnbayes::observation_set_from_json(dj);
        auto one = cfg;
        report = srnbayes::run_experiment_on_data(one, data, srnbayes::RunOptions{1, flags.out_dir},
                                                  &results);
      } else {
        report = srnbayes::run_experiment(cfg, srnbayes::RunOptions{flags.workers, flags.out_dir},
                                          &results);
      }
      print_report(report);
      return kExitOk;
    }

    if (repro->parsed()) {
      srnbayes::ReproduceOverrides over;
      over.H = flags.H;
      over.c = flags.c;
      over.sampler = flags.sampler;
      over.replications = flags.reps;
      over.seed = flags.seed;
      const auto report =
          srnbayes::reproduce(case_name, over, srnbayes::RunOptions{flags.workers, flags.out_dir});
      print_report(report);
      return kExitOk;
    }

    if (figure->parsed()) {
      std::filesystem::create_directories(flags.out_dir);
      if (kind == "diffusion-compare") {
        auto cfg = load_config(flags, "lotka");
        const std::string csv = srnbayes::diffusion_compare_csv(
            cfg, {2.0, 1.0, 0.5, 0.1}, 100, 30.0, flags.seed.value_or(cfg.seed));
        srnbayes::write_text_file(flags.out_dir + "/diffusion_compare.csv", csv);
        std::cout << "wrote " << flags.out_dir << "/diffusion_compare.csv\n";
      } else if (kind == "trajectory-bands") {
        auto cfg = load_config(flags, "enzyme");
        srnbayes::emit_trajectory_bands(cfg, 160, 1000, flags.out_dir);
        std::cout << "wrote " << flags.out_dir << "/bands.csv\n";
      } else if (kind == "violin") {
        auto cfg = load_config(flags, "lotka");
        std::vector<int> hs = flags.H ? std::vector<int>{*flags.H}
                                      : std::vector<int>{10, 20, 30, 40, 50};
        const std::string csv = srnbayes::violin_csv(cfg, {"two-stage", "ula"}, hs);
        srnbayes::write_text_file(flags.out_dir + "/violin.csv", csv);
        std::cout << "wrote " << flags.out_dir << "/violin.csv\n";
      } else {
        throw srnbayes::ConfigError("kind", "unknown figure kind: " + kind);
      }
      return kExitOk;
    }
  } catch (const srnbayes::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const srnbayes::AllReplicationsFailed& e) {
    std::cerr << e.what() << "\n";
    return kExitAllFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
