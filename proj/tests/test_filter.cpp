#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracle_kalman.hpp"
#include "srnbayes/lna/filter.hpp"
#include "srnbayes/lna/trajectory_bands.hpp"
#include "srnbayes/numerics/finite_diff.hpp"
#include "srnbayes/numerics/linalg.hpp"
#include "srnbayes/sim/gillespie.hpp"

using namespace srnbayes;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// 0 -> X at rate theta1; X -> 0 at rate theta2 x. The LNA is exact here.
ReactionNetwork immigration_death(double omega = 1.0) {
  Eigen::MatrixXd C(1, 2);
  C << 1, -1;
  std::vector<RateLaw> laws = {MassAction{{}, 0}, MassAction{{{0, 1}}, 1}};
  return ReactionNetwork(C, laws, omega);
}

ReactionNetwork enzyme_network() {
  Eigen::MatrixXd C(4, 3);
  C << -1, 1, 1, -1, 1, 0, 1, -1, -1, 0, 0, 1;
  std::vector<RateLaw> laws = {MassAction{{{0, 1}, {1, 1}}, 0}, MassAction{{{2, 1}}, 1},
                               MassAction{{{2, 1}}, 2}};
  return ReactionNetwork(C, laws, 1.0, {"Enzyme", "Substrate", "Complex", "Product"});
}

ParameterSpace enzyme_params() {
  std::vector<ParamSpec> specs(4);
  specs[0] = {"theta1", Transform::Log, 0, 0, Prior{}, 0.001};
  specs[1] = {"theta2", Transform::Log, 0, 0, Prior{}, 0.005};
  specs[2] = {"theta3", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 1.0, 0, 1}, {}};
  specs[3] = {"sigma", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 25.0, 0, 1}, {}};
  return ParameterSpace(std::move(specs));
}

ObservationSet enzyme_dataset(std::uint64_t seed, int H = 16, double sigma = 4.0) {
  const auto net = enzyme_network();
  const Eigen::VectorXd theta = vec({0.001, 0.005, 0.01});
  RngStream rng(seed, 0);
  const Eigen::VectorXd s0 =
      mvn_sample(rng, vec({50, 40, 60, 10}), Eigen::MatrixXd::Identity(4, 4))
          .array().round().max(0.0).matrix();
  RngStream data_rng(seed, 1);
  const auto traj = gillespie(net, theta, s0, 0.0, 80.0, data_rng);
  const auto schedule = evenly_spaced_schedule(0.0, 80.0 / H, H, {3}, vec({sigma}));
  ObservationSet data;
  data.trajectories.push_back(
      observe([&](double t) { return traj.concentration_at(t); }, schedule, data_rng));
  return data;
}

LnaMoments enzyme_init() {
  LnaMoments m;
  m.time = 0.0;
  m.mean = vec({50, 40, 60, 10});
  m.gamma = Eigen::MatrixXd::Identity(4, 4);
  return m;
}

}  // namespace

TEST_CASE("lna_propagate: t1 == t and zero rates leave moments unchanged") {
  const auto net = immigration_death();
  LnaMoments m;
  m.time = 1.0;
  m.mean = vec({5.0});
  m.gamma = Eigen::MatrixXd::Constant(1, 1, 2.0);

  const auto same = lna_propagate(net, vec({1.0, 0.5}), m, 1.0, 20);
  CHECK(same.mean(0) == m.mean(0));
  CHECK(same.gamma(0, 0) == m.gamma(0, 0));

  const auto frozen = lna_propagate(net, vec({0.0, 0.0}), m, 3.0, 20);
  CHECK(frozen.mean(0) == doctest::Approx(5.0));
  CHECK(frozen.gamma(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("lna_propagate: pure-death covariance matches the closed form") {
  // X -> 0 at rate theta x: Gamma(t) = e^{-2qt} G0 + s0 (e^{-qt} - e^{-2qt})
  Eigen::MatrixXd C(1, 1);
  C << -1;
  ReactionNetwork net(C, {MassAction{{{0, 1}}, 0}}, 1.0);
  const double q = 0.7, s0 = 5.0, g0 = 2.0, t = 1.3;
  LnaMoments m;
  m.time = 0.0;
  m.mean = vec({s0});
  m.gamma = Eigen::MatrixXd::Constant(1, 1, g0);
  const auto out = lna_propagate(net, vec({q}), m, t, 100);
  CHECK(out.mean(0) == doctest::Approx(s0 * std::exp(-q * t)).epsilon(1e-8));
  const double exact =
      std::exp(-2 * q * t) * g0 + s0 * (std::exp(-q * t) - std::exp(-2 * q * t));
  CHECK(out.gamma(0, 0) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("bayes_update: hand scalar Kalman values") {
  LnaMoments m;
  m.time = 0.0;
  m.mean = vec({1.0});
  m.gamma = Eigen::MatrixXd::Constant(1, 1, 2.0);
  const auto r = bayes_update(m, vec({3.0}), {0}, vec({1.0}), 1.0);
  CHECK(r.moments.mean(0) == doctest::Approx(7.0 / 3.0));
  CHECK(r.moments.gamma(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(r.predictive_loglik == doctest::Approx(mvn_logpdf(
            vec({3.0}), vec({1.0}), Eigen::MatrixXd::Constant(1, 1, 3.0))));
}

TEST_CASE("bayes_update: uninformative noise leaves moments unchanged") {
  LnaMoments m;
  m.time = 0.0;
  m.mean = vec({4.0, 7.0});
  m.gamma = (Eigen::MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const auto r = bayes_update(m, vec({100.0}), {1}, vec({1e6}), 1.0);
  CHECK((r.moments.mean - m.mean).cwiseAbs().maxCoeff() < 1e-6 * m.mean.norm());
  CHECK((r.moments.gamma - m.gamma).norm() < 1e-6 * m.gamma.norm());
}

TEST_CASE("bayes_update: exact full observation collapses the covariance") {
  LnaMoments m;
  m.time = 0.0;
  m.mean = vec({4.0, 7.0});
  m.gamma = (Eigen::MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const auto r = bayes_update(m, vec({5.0, 6.0}), {0, 1}, vec({0.0, 0.0}), 1.0);
  CHECK((r.moments.mean - vec({5.0, 6.0})).norm() < 1e-10);
  CHECK(r.moments.gamma.norm() < 1e-10);
}

TEST_CASE("bayes_update: information never hurts (beta <= gamma)") {
  RngStream rng(33, 0);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd B(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) B(i, j) = rng.normal();
    }
    LnaMoments m;
    m.time = 0.0;
    m.mean = vec({5.0, 6.0, 7.0});
    m.gamma = B * B.transpose() + 0.1 * Eigen::MatrixXd::Identity(3, 3);
    const auto r = bayes_update(m, vec({5.5, 6.5}), {0, 2}, vec({0.7, 1.3}),
                                1.0 + rng.uniform01());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m.gamma - r.moments.gamma);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
  }
}

TEST_CASE("filter equals the closed-form Kalman oracle on a linear network") {
  RngStream rng(202, 0);
  for (int trial = 0; trial < 10; ++trial) {
    const double theta1 = 0.5 + 4.0 * rng.uniform01();
    const double theta2 = 0.2 + 0.8 * rng.uniform01();
    const double omega = trial % 2 == 0 ? 1.0 : 2.0;
    const double sigma = 0.2 + 2.0 * rng.uniform01();
    const double m0 = 2.0 + 10.0 * rng.uniform01();
    const double g0 = 0.5 + 2.0 * rng.uniform01();
    const int H = 3 + static_cast<int>(rng.next_u64() % 6);

    std::vector<double> times, ys;
    double t = 0.0;
    for (int h = 0; h <= H; ++h) {
      times.push_back(t);
      ys.push_back(m0 + 4.0 * (rng.uniform01() - 0.5));
      t += 0.3 + 1.2 * rng.uniform01();
    }

    const auto net = immigration_death(omega);
    LnaMoments m;
    m.time = times.front();
    m.mean = vec({m0});
    m.gamma = Eigen::MatrixXd::Constant(1, 1, g0);

    oracle::ScalarKalman kal{theta1, theta2, omega};
    const auto truth = kal.filter(m0, g0 / omega, times, ys, sigma);

    const Eigen::VectorXd theta = vec({theta1, theta2});
    double total = 0.0;
    for (std::size_t h = 0; h < times.size(); ++h) {
      if (times[h] > m.time) m = lna_propagate(net, theta, m, times[h], 100);
      const auto upd = bayes_update(m, vec({ys[h]}), {0}, vec({sigma}), omega);
      m = upd.moments;
      total += upd.predictive_loglik;
      CHECK(m.mean(0) == doctest::Approx(truth[h].mean).epsilon(1e-8));
      CHECK(m.gamma(0, 0) / omega == doctest::Approx(truth[h].var).epsilon(1e-8));
      CHECK(upd.predictive_loglik == doctest::Approx(truth[h].predictive_loglik).epsilon(1e-8));
    }
    const double oracle_total = std::accumulate(
        truth.begin(), truth.end(), 0.0,
        [](double acc, const oracle::ScalarKalman::Step& s) { return acc + s.predictive_loglik; });
    CHECK(total == doctest::Approx(oracle_total).epsilon(1e-9));
  }
}

TEST_CASE("log_likelihood: single observation reduces to one predictive term") {
  const auto net = enzyme_network();
  const auto ps = enzyme_params();
  NoiseModel noise({{3, 3, 0.0}});
  ObservationSet data;
  ObservedTrajectory traj;
  Observation obs;
  obs.time = 0.0;
  obs.observed = {3};
  obs.values = vec({12.0});
  obs.noise_sd = vec({4.0});
  traj.points.push_back(obs);
  data.trajectories.push_back(traj);

  const Eigen::VectorXd phi = ps.to_unconstrained(vec({0.01, 4.0}));
  const double ll = log_likelihood(net, ps, noise, phi, data, enzyme_init(), 50);
  CHECK(ll == doctest::Approx(mvn_logpdf(vec({12.0}), vec({10.0}),
                                         Eigen::MatrixXd::Constant(1, 1, 17.0))));
}

TEST_CASE("log_likelihood: trajectory processing order does not matter") {
  const auto net = enzyme_network();
  const auto ps = enzyme_params();
  NoiseModel noise({{3, 3, 0.0}});
  ObservationSet data;
  for (std::uint64_t i = 0; i < 3; ++i) {
    auto d = enzyme_dataset(900 + i, 4);
    d.trajectories.front().id = static_cast<int>(i);
    data.trajectories.push_back(d.trajectories.front());
  }
  ObservationSet reversed = data;
  std::reverse(reversed.trajectories.begin(), reversed.trajectories.end());

  const Eigen::VectorXd phi = ps.to_unconstrained(vec({0.02, 3.0}));
  const double a = log_likelihood(net, ps, noise, phi, data, enzyme_init(), 30);
  const double b = log_likelihood(net, ps, noise, phi, reversed, enzyme_init(), 30);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("log_likelihood: invariant under species relabeling") {
  // swap species 0 and 1 everywhere (stoichiometry rows, rate-law indices,
  // initial moments, observed indices)
  const auto net = enzyme_network();
  Eigen::MatrixXd C = net.stoichiometry();
  C.row(0).swap(C.row(1));
  std::vector<RateLaw> laws = {MassAction{{{1, 1}, {0, 1}}, 0}, MassAction{{{2, 1}}, 1},
                               MassAction{{{2, 1}}, 2}};
  ReactionNetwork permuted(C, laws, 1.0);

  const auto ps = enzyme_params();
  NoiseModel noise({{3, 3, 0.0}});
  const auto data = enzyme_dataset(77, 8);
  const Eigen::VectorXd phi = ps.to_unconstrained(vec({0.015, 5.0}));

  LnaMoments init = enzyme_init();
  LnaMoments init_perm = init;
  std::swap(init_perm.mean(0), init_perm.mean(1));

  const double a = log_likelihood(net, ps, noise, phi, data, init, 50);
  const double b = log_likelihood(permuted, ps, noise, phi, data, init_perm, 50);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("log_likelihood: gamma stays symmetric through propagation") {
  const auto net = enzyme_network();
  LnaMoments m = enzyme_init();
  FilterDiagnostics diag;
  const auto out = lna_propagate(net, vec({0.001, 0.005, 0.01}), m, 80.0, 500, &diag);
  CHECK(symmetry_error(out.gamma) < 1e-10);
}

TEST_CASE("log_likelihood: higher at the truth than at 10x the truth") {
  const auto net = enzyme_network();
  const auto ps = enzyme_params();
  NoiseModel noise({{3, 3, 0.0}});
  const Eigen::VectorXd phi_true = ps.to_unconstrained(vec({0.01, 4.0}));
  const Eigen::VectorXd phi_off = ps.to_unconstrained(vec({0.1, 4.0}));
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto data = enzyme_dataset(1000 + seed, 16);
    const double lt = log_likelihood(net, ps, noise, phi_true, data, enzyme_init(), 30);
    const double lo = log_likelihood(net, ps, noise, phi_off, data, enzyme_init(), 30);
    if (lt > lo) ++wins;
  }
  CHECK(wins >= 95);
}

TEST_CASE("log_posterior: -inf outside the prior support, prior term inside") {
  const auto net = enzyme_network();
  const auto ps = enzyme_params();
  NoiseModel noise({{3, 3, 0.0}});
  const auto data = enzyme_dataset(55, 4);

  const Eigen::VectorXd phi_out = ps.to_unconstrained(vec({0.01, 4.0})).eval() +
                                  vec({0.0, 10.0});  // sigma ~ e^{11.4} > 25
  CHECK(std::isinf(log_posterior(net, ps, noise, phi_out, data, enzyme_init(), 30)));

  const Eigen::VectorXd phi = ps.to_unconstrained(vec({0.01, 4.0}));
  const double lp = log_posterior(net, ps, noise, phi, data, enzyme_init(), 30);
  const double ll = log_likelihood(net, ps, noise, phi, data, enzyme_init(), 30);
  CHECK(lp == doctest::Approx(ll + ps.log_prior_unconstrained(phi)));
}

TEST_CASE("infer_trajectory: exact full observation collapses the band") {
  const auto net = immigration_death();
  std::vector<ParamSpec> specs(2);
  specs[0] = {"t1", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 5.0, 0, 1}, {}};
  specs[1] = {"t2", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 5.0, 0, 1}, {}};
  ParameterSpace ps(std::move(specs));
  NoiseModel noise;  // sd 0 everywhere

  ObservedTrajectory traj;
  for (int h = 0; h <= 4; ++h) {
    Observation obs;
    obs.time = h * 1.0;
    obs.observed = {0};
    obs.values = vec({5.0 + h});
    obs.noise_sd = vec({0.0});
    traj.points.push_back(obs);
  }

  LnaMoments init;
  init.time = 0.0;
  init.mean = vec({5.0});
  init.gamma = Eigen::MatrixXd::Identity(1, 1);

  Eigen::MatrixXd samples(1, 2);
  samples << 1.0, 0.5;
  RngStream rng(3, 3);
  const auto bands = infer_trajectory(net, ps, noise, samples, traj, {0.0, 1.0, 2.0, 3.0, 4.0},
                                      200, init, 50, rng);
  for (int g = 0; g < 5; ++g) {
    CHECK(bands.hi95(g, 0) - bands.lo95(g, 0) < 1e-6);
    CHECK(bands.mean(g, 0) == doctest::Approx(5.0 + g).epsilon(1e-9));
  }
}

TEST_CASE("infer_trajectory: single draw with a fixed seed is deterministic") {
  const auto net = immigration_death();
  std::vector<ParamSpec> specs(2);
  specs[0] = {"t1", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 5.0, 0, 1}, {}};
  specs[1] = {"t2", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 5.0, 0, 1}, {}};
  ParameterSpace ps(std::move(specs));
  NoiseModel noise({{0, -1, 0.5}});

  ObservedTrajectory traj;
  Observation obs;
  obs.time = 0.0;
  obs.observed = {0};
  obs.values = vec({5.0});
  obs.noise_sd = vec({0.5});
  traj.points.push_back(obs);

  LnaMoments init;
  init.time = 0.0;
  init.mean = vec({5.0});
  init.gamma = Eigen::MatrixXd::Identity(1, 1);

  Eigen::MatrixXd samples(1, 2);
  samples << 1.0, 0.5;
  RngStream r1(9, 9), r2(9, 9);
  const auto b1 = infer_trajectory(net, ps, noise, samples, traj, {0.0, 0.5, 1.0}, 1, init, 50, r1);
  const auto b2 = infer_trajectory(net, ps, noise, samples, traj, {0.0, 0.5, 1.0}, 1, init, 50, r2);
  CHECK((b1.mean - b2.mean).norm() == 0.0);
  CHECK((b1.mean - b1.lo95).norm() == 0.0);  // one draw: band equals the path
}

TEST_CASE("dense transition likelihood: one step equals the EM density") {
  const auto net = immigration_death();
  std::vector<ParamSpec> specs(2);
  specs[0] = {"t1", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 5.0, 0, 1}, {}};
  specs[1] = {"t2", Transform::Log, 0, 0, Prior{Prior::Type::Uniform, 0.0, 5.0, 0, 1}, {}};
  ParameterSpace ps(std::move(specs));

  ObservationSet data;
  ObservedTrajectory traj;
  for (int h = 0; h < 2; ++h) {
    Observation obs;
    obs.time = 0.5 * h;
    obs.observed = {0};
    obs.values = vec({h == 0 ? 6.0 : 6.4});
    obs.noise_sd = vec({0.0});
    traj.points.push_back(obs);
  }
  data.trajectories.push_back(traj);

  const Eigen::VectorXd theta = vec({1.2, 0.4});
  const Eigen::VectorXd phi = ps.to_unconstrained(theta);
  // mean = 6 + (1.2 - 0.4*6)*0.5 = 5.4; var = (1.2 + 0.4*6)*0.5 = 1.8
  const double expected = mvn_logpdf(vec({6.4}), vec({5.4}),
                                     Eigen::MatrixXd::Constant(1, 1, 1.8));
  CHECK(dense_transition_log_likelihood(net, ps, phi, data) == doctest::Approx(expected));
}
