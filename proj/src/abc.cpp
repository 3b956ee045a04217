#include "srnbayes/samplers/abc.hpp"

#include <cmath>
#include <string>

#include "srnbayes/error.hpp"

namespace srnbayes {

namespace {

constexpr long kFeasibilityWindow = 1000000;  // attempts without an acceptance

double gaussian_kernel_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                               const Eigen::VectorXd& sd) {
  double density = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double z = (x(i) - mu(i)) / sd(i);
    density *= std::exp(-0.5 * z * z) / (sd(i) * 2.5066282746310005);
  }
  return density;
}

}  // namespace

double discrepancy(const ObservationSet& data, const ObservationSet& simulated) {
  if (data.trajectories.size() != simulated.trajectories.size()) {
    throw DimensionMismatch("discrepancy: trajectory counts differ");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < data.trajectories.size(); ++i) {
    const auto& a = data.trajectories[i].points;
    const auto& b = simulated.trajectories[i].points;
    if (a.size() != b.size()) throw DimensionMismatch("discrepancy: observation counts differ");
    for (std::size_t h = 0; h < a.size(); ++h) {
      if (a[h].values.size() != b[h].values.size()) {
        throw DimensionMismatch("discrepancy: component counts differ");
      }
      ss += (a[h].values - b[h].values).squaredNorm();
    }
  }
  return std::sqrt(ss);
}

AbcResult abc_rejection(const AbcSimulator& simulate, const ParameterSpace& ps,
                        const ObservationSet& data, double epsilon, int num_samples,
                        RngStream& rng) {
  AbcResult out;
  out.samples.resize(num_samples, ps.free_dim());
  int accepted = 0;
  long since_last_accept = 0;
  while (accepted < num_samples) {
    if (since_last_accept >= kFeasibilityWindow) {
      throw InfeasibleThreshold("abc_rejection: acceptance rate below 1e-6 at epsilon=" +
                                std::to_string(epsilon));
    }
    const Eigen::VectorXd theta = ps.draw_prior_free(rng);
    const ObservationSet sim = simulate(theta, rng);
    ++out.simulations;
    ++since_last_accept;
    if (discrepancy(data, sim) <= epsilon) {
      out.samples.row(accepted++) = theta.transpose();
      since_last_accept = 0;
    }
  }
  out.solved = true;
  return out;
}

AbcResult abc_smc(const AbcSimulator& simulate, const ParameterSpace& ps,
                  const ObservationSet& data, const std::vector<double>& epsilon_schedule,
                  const Eigen::VectorXd& kernel_sd, int num_particles, RngStream& rng) {
  if (epsilon_schedule.empty()) throw std::invalid_argument("abc_smc: empty schedule");
  for (std::size_t p = 1; p < epsilon_schedule.size(); ++p) {
    if (epsilon_schedule[p] >= epsilon_schedule[p - 1]) {
      throw std::invalid_argument("abc_smc: schedule must be strictly decreasing");
    }
  }
  const int B = num_particles;
  const int d = ps.free_dim();
  if (kernel_sd.size() != d) throw DimensionMismatch("abc_smc: kernel dimension");

  AbcResult out;

  // Population 0 is the prior (epsilon_0 = inf) with uniform weights.
  Eigen::MatrixXd particles(B, d);
  for (int b = 0; b < B; ++b) particles.row(b) = ps.draw_prior_free(rng).transpose();
  Eigen::VectorXd weights = Eigen::VectorXd::Constant(B, 1.0 / B);

  Eigen::MatrixXd next_particles(B, d);
  Eigen::VectorXd next_weights(B);

  for (std::size_t p = 0; p < epsilon_schedule.size(); ++p) {
    const double eps = epsilon_schedule[p];
    long since_last_accept = 0;
    for (int b = 0; b < B; ++b) {
      Eigen::VectorXd prop(d);
      while (true) {
        if (since_last_accept >= kFeasibilityWindow) {
          throw InfeasibleThreshold("abc_smc: stalled at population " + std::to_string(p + 1) +
                                    " (epsilon=" + std::to_string(eps) + ")");
        }
        const int j = rng.pick_weighted(weights.data(), B, weights.sum());
        for (int i = 0; i < d; ++i) prop(i) = particles(j, i) + kernel_sd(i) * rng.normal();
        if (!ps.in_support(prop)) {
          ++since_last_accept;
          continue;  // prior density zero: the particle cannot carry weight
        }
        const ObservationSet sim = simulate(prop, rng);
        ++out.simulations;
        ++since_last_accept;
        if (discrepancy(data, sim) <= eps) break;
      }
      since_last_accept = 0;

      double denom = 0.0;
      for (int j = 0; j < B; ++j) {
        denom += weights(j) * gaussian_kernel_density(prop, particles.row(j).transpose(),
                                                      kernel_sd);
      }
      next_particles.row(b) = prop.transpose();
      next_weights(b) = std::exp(ps.log_prior_constrained(prop)) / denom;
    }

    const double wsum = next_weights.sum();
    if (!(wsum > 0.0) || !next_weights.allFinite()) {
      throw DegenerateWeights(static_cast<int>(p + 1), "abc_smc: invalid weights");
    }
    const Eigen::VectorXd norm_w = next_weights / wsum;
    const double ess = 1.0 / norm_w.squaredNorm();
    if (ess < 2.0) {
      throw DegenerateWeights(static_cast<int>(p + 1),
                              "abc_smc: effective sample size below 2");
    }

    // Multinomial resampling, then uniform weights.
    Eigen::MatrixXd resampled(B, d);
    for (int b = 0; b < B; ++b) {
      const int j = rng.pick_weighted(norm_w.data(), B, 1.0);
      resampled.row(b) = next_particles.row(j);
    }
    particles = resampled;
    weights.setConstant(1.0 / B);
  }

  out.samples = particles;
  out.solved = true;
  return out;
}

Eigen::VectorXd default_abc_kernel_sd(const ParameterSpace& ps) {
  Eigen::VectorXd sd(ps.free_dim());
  for (int k = 0; k < ps.free_dim(); ++k) {
    const auto& prior = ps.free_spec(k).prior;
    if (prior.type == Prior::Type::Uniform) {
      sd(k) = 0.05 * (prior.b - prior.a);
    } else {
      sd(k) = 0.05 * 4.0 * prior.sd;  // 5% of a +-2 sd range
    }
  }
  return sd;
}

}  // namespace srnbayes
