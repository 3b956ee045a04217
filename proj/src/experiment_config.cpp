#include "srnbayes/exp/experiment_config.hpp"

#include <fstream>

#include "srnbayes/error.hpp"
#include "srnbayes/exp/presets_data.hpp"

namespace srnbayes {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& msg) {
  throw ConfigError(field, msg);
}

const json& need(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path + "." + key, "missing field");
  return j.at(key);
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

Eigen::VectorXd parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = num(j[i], path);
  return v;
}

// "identity", a scalar (multiple of identity), a vector (diagonal), or a
// full row-major matrix.
Eigen::MatrixXd parse_matrix(const json& j, int dim, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() == "identity") return Eigen::MatrixXd::Identity(dim, dim);
    fail(path, "unknown matrix shorthand");
  }
  if (j.is_number()) return j.get<double>() * Eigen::MatrixXd::Identity(dim, dim);
  if (j.is_array() && !j.empty() && j[0].is_number()) {
    const Eigen::VectorXd d = parse_vector(j, path);
    if (d.size() != dim) fail(path, "diagonal length mismatch");
    return d.asDiagonal();
  }
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != dim) fail(path, "row count mismatch");
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
      const Eigen::VectorXd row = parse_vector(j[static_cast<std::size_t>(r)], path);
      if (row.size() != dim) fail(path, "column count mismatch");
      m.row(r) = row.transpose();
    }
    return m;
  }
  fail(path, "expected matrix");
}

std::vector<std::pair<int, int>> parse_reactants(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of [species, multiplicity] pairs");
  std::vector<std::pair<int, int>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) fail(path, "expected [species, multiplicity]");
    out.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return out;
}

RateLaw parse_rate_law(const json& j, const std::map<std::string, int>& param_index,
                       const std::string& path) {
  const std::string law = need(j, "law", path).get<std::string>();
  auto pidx = [&](const std::string& key) {
    const std::string name = need(j, key, path).get<std::string>();
    const auto it = param_index.find(name);
    if (it == param_index.end()) fail(path + "." + key, "unknown parameter: " + name);
    return it->second;
  };
  if (law == "mass_action") {
    MassAction m;
    m.reactants = parse_reactants(need(j, "reactants", path), path + ".reactants");
    m.param = pidx("param");
    return m;
  }
  if (law == "combinatorial") {
    CombinatorialMassAction c;
    c.species = need(j, "species", path).get<int>();
    c.param = pidx("param");
    return c;
  }
  if (law == "conserved_complement") {
    ConservedComplement c;
    c.species = need(j, "species", path).get<int>();
    c.zeta = num(need(j, "zeta", path), path + ".zeta");
    c.param = pidx("param");
    return c;
  }
  if (law == "michaelis_menten") {
    MichaelisMenten m;
    m.vmax_param = pidx("vmax_param");
    for (const auto& f : need(j, "factors", path)) {
      const std::string km = need(f, "km_param", path).get<std::string>();
      const auto it = param_index.find(km);
      if (it == param_index.end()) fail(path + ".factors", "unknown parameter: " + km);
      m.factors.emplace_back(need(f, "species", path).get<int>(), it->second);
    }
    return m;
  }
  fail(path + ".law", "unknown rate law: " + law);
}

Transform parse_transform(const json& j, const std::string& path) {
  const std::string t = j.get<std::string>();
  if (t == "identity") return Transform::Identity;
  if (t == "log") return Transform::Log;
  if (t == "logit") return Transform::Logit;
  fail(path, "unknown transform: " + t);
}

Prior parse_prior(const json& j, const std::string& path) {
  Prior p;
  const std::string t = need(j, "type", path).get<std::string>();
  if (t == "uniform") {
    p.type = Prior::Type::Uniform;
    p.a = num(need(j, "a", path), path + ".a");
    p.b = num(need(j, "b", path), path + ".b");
  } else if (t == "gaussian") {
    p.type = Prior::Type::Gaussian;
    p.mu = num(need(j, "mu", path), path + ".mu");
    p.sd = num(need(j, "sd", path), path + ".sd");
  } else {
    fail(path + ".type", "unknown prior: " + t);
  }
  return p;
}

SamplerSpec parse_sampler_spec(const json& j, const std::string& type, const std::string& path) {
  SamplerSpec s;
  s.type = type;
  if (j.contains("c")) s.cfg.c = num(j.at("c"), path + ".c");
  if (j.contains("eps1")) s.cfg.eps1 = num(j.at("eps1"), path + ".eps1");
  if (j.contains("eps2")) s.cfg.eps2 = num(j.at("eps2"), path + ".eps2");
  if (j.contains("max_iters")) s.cfg.max_iters = j.at("max_iters").get<long>();
  if (j.contains("burn_in")) s.cfg.burn_in = j.at("burn_in").get<long>();
  if (j.contains("thin")) s.cfg.thin = j.at("thin").get<long>();
  if (j.contains("B")) s.cfg.num_samples = j.at("B").get<int>();
  if (j.contains("schedule")) {
    for (const auto& e : j.at("schedule")) s.abc_schedule.push_back(num(e, path + ".schedule"));
  }
  if (j.contains("schedules_by_H")) {
    for (const auto& [k, v] : j.at("schedules_by_H").items()) {
      std::vector<double> sched;
      for (const auto& e : v) sched.push_back(num(e, path + ".schedules_by_H"));
      s.abc_schedules_by_h[std::stoi(k)] = sched;
    }
  }
  if (j.contains("kernel_sd")) s.abc_kernel_sd = parse_vector(j.at("kernel_sd"), path + ".kernel_sd");
  if (j.contains("epsilon")) s.abc_epsilon = num(j.at("epsilon"), path + ".epsilon");
  if (j.contains("budget_evals")) s.budget_evals = j.at("budget_evals").get<long>();
  if (s.cfg.c <= 0 || s.cfg.eps1 <= 0 || s.cfg.eps2 <= 0 || s.cfg.max_iters < 1 ||
      s.cfg.burn_in < 0 || s.cfg.thin < 1 || s.cfg.num_samples < 1) {
    fail(path, "sampler settings must be positive (thin >= 1, burn_in >= 0)");
  }
  return s;
}

}  // namespace

double ObservationSpec::spacing() const {
  if (dt) return *dt;
  if (t_end) return (*t_end - t0) / H;
  fail("observation", "needs dt or t_end");
}

double ObservationSpec::span_end() const { return t0 + spacing() * H; }

std::vector<double> ObservationSpec::times() const {
  std::vector<double> out;
  const double d = spacing();
  out.reserve(static_cast<std::size_t>(H) + 1);
  for (int h = 0; h <= H; ++h) out.push_back(t0 + h * d);
  return out;
}

void ExperimentConfig::select_sampler(const std::string& type) {
  const auto it = sampler_presets.find(type);
  if (it != sampler_presets.end()) {
    sampler = it->second;
  } else {
    sampler.type = type;
  }
}

void ExperimentConfig::set_h(int H) {
  if (H < 1) fail("observation.H", "H must be >= 1");
  observation.H = H;
}

ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  if (need(j, "version", "config").get<int>() != 1) fail("version", "unsupported config version");
  cfg.name = j.value("name", "experiment");

  // Parameters come first: rate laws refer to them by name.
  std::vector<ParamSpec> specs;
  std::map<std::string, int> param_index;
  std::vector<double> true_vals;
  const auto& params = need(j, "parameters", "config");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& pj = params[i];
    const std::string path = "parameters[" + std::to_string(i) + "]";
    ParamSpec p;
    p.name = need(pj, "name", path).get<std::string>();
    if (pj.contains("fixed")) {
      p.fixed = num(pj.at("fixed"), path + ".fixed");
      true_vals.push_back(*p.fixed);
    } else {
      p.transform = parse_transform(need(pj, "transform", path), path + ".transform");
      p.prior = parse_prior(need(pj, "prior", path), path + ".prior");
      if (p.transform == Transform::Logit) {
        p.lo = pj.contains("lo") ? num(pj.at("lo"), path) : p.prior.a;
        p.hi = pj.contains("hi") ? num(pj.at("hi"), path) : p.prior.b;
      }
      true_vals.push_back(num(need(pj, "true", path), path + ".true"));
    }
    param_index[p.name] = static_cast<int>(i);
    specs.push_back(std::move(p));
  }
  cfg.params = std::make_shared<ParameterSpace>(std::move(specs));
  cfg.true_full = Eigen::Map<Eigen::VectorXd>(true_vals.data(),
                                              static_cast<Eigen::Index>(true_vals.size()));

  // Target.
  if (j.contains("target")) {
    const auto& tj = j.at("target");
    const std::string type = tj.value("type", "filter");
    if (type == "filter") {
      cfg.target.type = TargetSpec::Type::Filter;
    } else if (type == "dense_transition") {
      cfg.target.type = TargetSpec::Type::DenseTransition;
    } else if (type == "quadratic") {
      cfg.target.type = TargetSpec::Type::Quadratic;
      cfg.target.quad_mu = parse_vector(need(tj, "mu", "target"), "target.mu");
      cfg.target.quad_precision = parse_matrix(need(tj, "precision", "target"),
                                               static_cast<int>(cfg.target.quad_mu.size()),
                                               "target.precision");
    } else {
      fail("target.type", "unknown target type: " + type);
    }
    cfg.target.substeps = tj.value("substeps", 50);
    if (cfg.target.substeps < 1) fail("target.substeps", "must be >= 1");
  }

  // Network (not needed for a quadratic synthetic target).
  if (cfg.target.type != TargetSpec::Type::Quadratic) {
    const auto& nj = need(j, "network", "config");
    std::vector<std::string> species;
    for (const auto& s : need(nj, "species", "network")) species.push_back(s.get<std::string>());
    const int ns = static_cast<int>(species.size());
    const auto& rj = need(nj, "reactions", "network");
    const int nr = static_cast<int>(rj.size());
    if (nr < 1) fail("network.reactions", "needs at least one reaction");
    Eigen::MatrixXd stoich(ns, nr);
    std::vector<RateLaw> laws;
    for (int k = 0; k < nr; ++k) {
      const std::string path = "network.reactions[" + std::to_string(k) + "]";
      const Eigen::VectorXd col = parse_vector(need(rj[k], "stoich", path), path + ".stoich");
      if (col.size() != ns) fail(path + ".stoich", "length != species count");
      stoich.col(k) = col;
      laws.push_back(parse_rate_law(rj[k], param_index, path));
    }
    const double omega = nj.value("system_size", 1.0);
    if (omega <= 0) fail("network.system_size", "must be > 0");
    cfg.network = std::make_shared<ReactionNetwork>(stoich, laws, omega, species);
    for (const auto& law : laws) {
      if (rate_law_max_param(law) >= static_cast<int>(true_vals.size())) {
        fail("network.reactions", "rate law references a parameter out of range");
      }
    }

    // Observation design.
    const auto& oj = need(j, "observation", "config");
    cfg.observation.t0 = num(need(oj, "t0", "observation"), "observation.t0");
    cfg.observation.H = need(oj, "H", "observation").get<int>();
    if (cfg.observation.H < 1) fail("observation.H", "must be >= 1");
    if (oj.contains("dt")) cfg.observation.dt = num(oj.at("dt"), "observation.dt");
    if (oj.contains("t_end")) cfg.observation.t_end = num(oj.at("t_end"), "observation.t_end");
    if (!cfg.observation.dt && !cfg.observation.t_end) {
      fail("observation", "needs dt or t_end");
    }
    for (const auto& e : need(oj, "observed", "observation")) {
      const int idx = e.get<int>();
      if (idx < 0 || idx >= ns) fail("observation.observed", "species index out of range");
      cfg.observation.observed.push_back(idx);
    }
    if (cfg.observation.observed.empty()) fail("observation.observed", "must not be empty");
    std::vector<NoiseModel::Entry> noise_entries;
    if (oj.contains("noise")) {
      for (const auto& e : oj.at("noise")) {
        NoiseModel::Entry entry;
        entry.species = need(e, "species", "observation.noise").get<int>();
        if (e.contains("param")) {
          const std::string name = e.at("param").get<std::string>();
          const auto it = param_index.find(name);
          if (it == param_index.end()) {
            fail("observation.noise", "unknown parameter: " + name);
          }
          entry.param = it->second;
        } else {
          entry.value = num(need(e, "value", "observation.noise"), "observation.noise.value");
          if (entry.value < 0) fail("observation.noise.value", "must be >= 0");
        }
        const std::string scale = e.value("scale", "sd");
        if (scale == "variance") {
          entry.variance = true;
        } else if (scale != "sd") {
          fail("observation.noise.scale", "must be 'sd' or 'variance'");
        }
        noise_entries.push_back(entry);
      }
    }
    cfg.noise = NoiseModel(std::move(noise_entries));

    // Initial state for data generation.
    const auto& isj = need(j, "initial_state", "config");
    cfg.initial_state.mean = parse_vector(need(isj, "mean", "initial_state"), "initial_state.mean");
    if (cfg.initial_state.mean.size() != ns) fail("initial_state.mean", "length != species count");
    cfg.initial_state.random = isj.value("random", false);
    cfg.initial_state.round = isj.value("round", true);
    cfg.initial_state.cov = isj.contains("cov")
                                ? parse_matrix(isj.at("cov"), ns, "initial_state.cov")
                                : Eigen::MatrixXd::Zero(ns, ns);

    // Initial moments for the filter.
    if (j.contains("initial_moments")) {
      const auto& imj = j.at("initial_moments");
      cfg.initial_moments.mean =
          parse_vector(need(imj, "mean", "initial_moments"), "initial_moments.mean");
      cfg.initial_moments.gamma =
          parse_matrix(need(imj, "gamma", "initial_moments"), ns, "initial_moments.gamma");
    } else {
      cfg.initial_moments.mean = cfg.initial_state.mean;
      cfg.initial_moments.gamma = Eigen::MatrixXd::Identity(ns, ns);
    }
    if (cfg.initial_moments.mean.size() != ns) fail("initial_moments.mean", "length mismatch");
    cfg.initial_moments.time = cfg.observation.t0;
  }

  // Samplers: per-type presets plus the active selection.
  if (j.contains("samplers")) {
    for (const auto& [type, spec] : j.at("samplers").items()) {
      cfg.sampler_presets[type] = parse_sampler_spec(spec, type, "samplers." + type);
    }
  }
  const std::string active = j.value("sampler", "two-stage");
  cfg.select_sampler(active);

  cfg.replications = j.value("replications", 20);
  if (cfg.replications < 1) fail("replications", "must be >= 1");
  cfg.seed = j.value("seed", 1ull);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config", std::string("JSON parse error: ") + e.what());
  }
  return parse_experiment_config(j);
}

ExperimentConfig load_preset(const std::string& case_name) {
  const char* text = nullptr;
  if (case_name == "enzyme") text = presets::kEnzyme;
  if (case_name == "lotka") text = presets::kLotka;
  if (case_name == "genenet") text = presets::kGenenet;
  if (!text) throw ConfigError("case", "unknown case: " + case_name);
  return parse_experiment_config(nlohmann::json::parse(text));
}

std::vector<std::string> preset_names() { return {"enzyme", "lotka", "genenet"}; }

}  // namespace srnbayes
