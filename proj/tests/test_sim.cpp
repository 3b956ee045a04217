#include <cmath>

#include "doctest.h"
#include "srnbayes/numerics/ode.hpp"
#include "srnbayes/sim/euler_maruyama.hpp"
#include "srnbayes/sim/gillespie.hpp"
#include "srnbayes/sim/observe.hpp"

using namespace srnbayes;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

ReactionNetwork enzyme_network() {
  Eigen::MatrixXd C(4, 3);
  C << -1, 1, 1, -1, 1, 0, 1, -1, -1, 0, 0, 1;
  std::vector<RateLaw> laws = {MassAction{{{0, 1}, {1, 1}}, 0}, MassAction{{{2, 1}}, 1},
                               MassAction{{{2, 1}}, 2}};
  return ReactionNetwork(C, laws, 1.0);
}

ReactionNetwork pure_death() {
  Eigen::MatrixXd C(1, 1);
  C << -1;
  return ReactionNetwork(C, {MassAction{{{0, 1}}, 0}}, 1.0);
}

ReactionNetwork pure_birth() {
  Eigen::MatrixXd C(1, 1);
  C << 1;
  return ReactionNetwork(C, {MassAction{{{0, 1}}, 0}}, 1.0);
}

ReactionNetwork lotka_network(double omega = 1.0) {
  Eigen::MatrixXd C(2, 3);
  C << 1, -1, 0, 0, 1, -1;
  std::vector<RateLaw> laws = {MassAction{{{0, 1}}, 0}, MassAction{{{0, 1}, {1, 1}}, 1},
                               MassAction{{{1, 1}}, 2}};
  return ReactionNetwork(C, laws, omega);
}

}  // namespace

TEST_CASE("gillespie: all rates zero freezes the state") {
  const auto net = pure_death();
  RngStream rng(1, 0);
  const auto traj = gillespie(net, vec({0.5}), vec({0.0}), 0.0, 10.0, rng);
  CHECK(traj.times.size() == 1);
  CHECK(traj.counts_at(9.0)(0) == 0.0);
}

TEST_CASE("gillespie: enzyme mean first waiting time is 1 / 2.9") {
  const auto net = enzyme_network();
  const Eigen::VectorXd theta = vec({0.001, 0.005, 0.01});
  const Eigen::VectorXd s0 = vec({50, 40, 60, 10});
  double sum = 0.0;
  const int runs = 10000;
  for (int r = 0; r < runs; ++r) {
    RngStream rng(500, static_cast<std::uint64_t>(r));
    const auto traj = gillespie(net, theta, s0, 0.0, 100.0, rng);
    REQUIRE(traj.times.size() >= 2);
    sum += traj.times[1];
  }
  CHECK(sum / runs == doctest::Approx(1.0 / 2.9).epsilon(0.03));
}

TEST_CASE("gillespie: pure-death mean matches the exponential decay profile") {
  const auto net = pure_death();
  const double theta = 0.15;
  const std::vector<double> probe{2.0, 5.0, 10.0};
  std::vector<double> mean(probe.size(), 0.0);
  const int runs = 1000;
  for (int r = 0; r < runs; ++r) {
    RngStream rng(42, static_cast<std::uint64_t>(r));
    const auto states = gillespie_sample_at(net, vec({theta}), vec({100.0}), 0.0, probe, rng);
    for (std::size_t i = 0; i < probe.size(); ++i) mean[i] += states[i](0);
  }
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CHECK(mean[i] / runs == doctest::Approx(100.0 * std::exp(-theta * probe[i])).epsilon(0.05));
  }
}

TEST_CASE("gillespie: linear birth mean within 3 standard errors") {
  const auto net = pure_birth();
  const double theta = 0.2, t = 4.0, s0 = 20.0;
  const int runs = 1000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < runs; ++r) {
    RngStream rng(7, static_cast<std::uint64_t>(r));
    const auto states = gillespie_sample_at(net, vec({theta}), vec({s0}), 0.0, {t}, rng);
    sum += states[0](0);
    sum2 += states[0](0) * states[0](0);
  }
  const double mean = sum / runs;
  const double sd = std::sqrt((sum2 / runs - mean * mean) / (runs - 1));
  CHECK(std::abs(mean - s0 * std::exp(theta * t)) <= 3.0 * sd);
}

TEST_CASE("gillespie: counts stay nonnegative integers scaled by Omega") {
  const auto net = lotka_network(2.0);
  for (int r = 0; r < 20; ++r) {
    RngStream rng(99, static_cast<std::uint64_t>(r));
    const auto traj = gillespie(net, vec({0.5, 0.0025, 0.3}), vec({35.5, 39.5}), 0.0, 2.0, rng);
    for (const auto& x : traj.counts) {
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        CHECK(x(j) >= 0.0);
        CHECK(x(j) == std::round(x(j)));
      }
    }
  }
}

TEST_CASE("gillespie_sample_at agrees with the stored trajectory") {
  const auto net = lotka_network();
  const Eigen::VectorXd theta = vec({0.5, 0.0025, 0.3});
  const std::vector<double> probe{0.0, 0.5, 1.0, 1.7, 2.0};
  RngStream r1(11, 3), r2(11, 3);
  const auto traj = gillespie(net, theta, vec({71, 79}), 0.0, 2.0, r1);
  const auto states = gillespie_sample_at(net, theta, vec({71, 79}), 0.0, probe, r2);
  for (std::size_t i = 0; i < probe.size(); ++i) {
    CHECK((states[i] - traj.concentration_at(probe[i])).norm() == 0.0);
  }
}

TEST_CASE("euler_maruyama: zero rates give a constant path") {
  const auto net = pure_death();
  RngStream rng(5, 0);
  const auto path = euler_maruyama(net, vec({0.5}), vec({0.0}), {0.0, 1.0, 2.0}, rng);
  for (const auto& s : path) CHECK(s(0) == 0.0);
}

TEST_CASE("euler_maruyama: seeded runs are bit-reproducible") {
  const auto net = lotka_network();
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(0.1 * i);
  RngStream r1(21, 9), r2(21, 9);
  const auto p1 = euler_maruyama(net, vec({0.5, 0.0025, 0.3}), vec({71, 79}), grid, r1);
  const auto p2 = euler_maruyama(net, vec({0.5, 0.0025, 0.3}), vec({71, 79}), grid, r2);
  for (std::size_t i = 0; i < p1.size(); ++i) CHECK((p1[i] - p2[i]).norm() == 0.0);
}

TEST_CASE("euler_maruyama: large-Omega limit converges to the drift ODE at O(dt)") {
  const auto net = lotka_network(1e12);  // noise is O(Omega^-1/2)
  const Eigen::VectorXd theta = vec({0.5, 0.0025, 0.3});
  const VectorField drift_field = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy = net.drift(y, theta);
  };
  const Eigen::VectorXd ode = rk4_integrate(drift_field, vec({71, 79}), 0.0, 5.0, 2000);

  auto em_error = [&](double dt) {
    std::vector<double> grid;
    for (int i = 0; dt * i <= 5.0 + 1e-9; ++i) grid.push_back(dt * i);
    RngStream rng(4, 4);
    const auto path = euler_maruyama(net, theta, vec({71, 79}), grid, rng);
    return (path.back() - ode).cwiseAbs().maxCoeff();
  };
  const double e1 = em_error(0.01);
  const double e2 = em_error(0.005);
  CHECK(e1 < 2.0);             // small in absolute terms at dt = 0.01
  const double ratio = e1 / e2;
  CHECK(ratio > 1.5);          // roughly halves with the step: first order
  CHECK(ratio < 3.0);
}

TEST_CASE("observe: zero noise and full observation reproduce the state") {
  const auto net = lotka_network();
  RngStream rng(6, 1);
  const auto traj = gillespie(net, vec({0.5, 0.0025, 0.3}), vec({71, 79}), 0.0, 2.0, rng);
  const auto schedule = evenly_spaced_schedule(0.0, 0.5, 4, {0, 1}, vec({0.0, 0.0}));
  RngStream obs_rng(6, 2);
  const auto obs = observe([&](double t) { return traj.concentration_at(t); }, schedule, obs_rng);
  for (const auto& pt : obs.points) {
    CHECK((pt.values - traj.concentration_at(pt.time).head(2)).norm() == 0.0);
  }
}

TEST_CASE("observe: noise standard deviation matches sigma") {
  const auto schedule = evenly_spaced_schedule(0.0, 1.0, 0, {0}, vec({4.0}));
  const auto fixed_state = [](double) { return Eigen::VectorXd::Constant(1, 10.0); };
  const int n = 10000;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < n; ++r) {
    RngStream rng(8, static_cast<std::uint64_t>(r));
    const auto obs = observe(fixed_state, schedule, rng);
    const double y = obs.points[0].values(0);
    sum += y;
    sum2 += y * y;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  CHECK(sd == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("observe: same seed yields identical observation sets") {
  const auto net = enzyme_network();
  const Eigen::VectorXd theta = vec({0.001, 0.005, 0.01});
  RngStream t1(14, 0), t2(14, 0);
  const auto traj1 = gillespie(net, theta, vec({50, 40, 60, 10}), 0.0, 80.0, t1);
  const auto traj2 = gillespie(net, theta, vec({50, 40, 60, 10}), 0.0, 80.0, t2);
  const auto schedule = evenly_spaced_schedule(0.0, 5.0, 16, {3}, vec({4.0}));
  RngStream o1(14, 1), o2(14, 1);
  const auto a = observe([&](double t) { return traj1.concentration_at(t); }, schedule, o1);
  const auto b = observe([&](double t) { return traj2.concentration_at(t); }, schedule, o2);
  for (std::size_t h = 0; h < a.points.size(); ++h) {
    CHECK((a.points[h].values - b.points[h].values).norm() == 0.0);
  }
}
