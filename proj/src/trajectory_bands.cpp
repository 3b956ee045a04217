#include "srnbayes/lna/trajectory_bands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srnbayes/error.hpp"
#include "srnbayes/numerics/linalg.hpp"

namespace srnbayes {

namespace {

constexpr double kTimeEps = 1e-9;

double quantile_sorted(const std::vector<double>& sorted, double p) {
  const double idx = p * (static_cast<double>(sorted.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(idx));
  const auto hi = static_cast<std::size_t>(std::ceil(idx));
  const double w = idx - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

TrajectoryBands infer_trajectory(const ReactionNetwork& net, const ParameterSpace& ps,
                                 const NoiseModel& noise, const Eigen::MatrixXd& theta_samples,
                                 const ObservedTrajectory& data, const std::vector<double>& grid,
                                 int num_draws, const LnaMoments& init, int substeps,
                                 RngStream& rng) {
  if (grid.empty()) throw std::invalid_argument("infer_trajectory: empty grid");
  if (theta_samples.rows() < 1) throw std::invalid_argument("infer_trajectory: no samples");
  if (grid.front() < init.time - kTimeEps) {
    throw std::invalid_argument("infer_trajectory: grid starts before the initial moments");
  }

  const int n = net.num_species();
  const auto g_count = grid.size();
  // draws[g](d, j): state draw d at grid point g, species j
  std::vector<Eigen::MatrixXd> draws(g_count, Eigen::MatrixXd(num_draws, n));

  for (int d = 0; d < num_draws; ++d) {
    const int row = theta_samples.rows() == 1
                        ? 0
                        : static_cast<int>(rng.next_u64() %
                                           static_cast<std::uint64_t>(theta_samples.rows()));
    const Eigen::VectorXd full = ps.full_params(theta_samples.row(row).transpose());

    LnaMoments m = init;
    std::size_t gi = 0;
    auto emit = [&](std::size_t g, const LnaMoments& mm) {
      draws[g].row(d) = mvn_sample(rng, mm.mean, mm.gamma / net.system_size()).transpose();
    };
    auto advance_to = [&](double t) {
      if (t > m.time + kTimeEps) m = lna_propagate(net, full, m, t, substeps);
    };

    for (const auto& obs : data.points) {
      while (gi < g_count && grid[gi] < obs.time - kTimeEps) {
        advance_to(grid[gi]);
        emit(gi, m);
        ++gi;
      }
      advance_to(obs.time);
      const Eigen::VectorXd sd = noise.sd_vector(obs.observed, full);
      m = bayes_update(m, obs.values, obs.observed, sd, net.system_size()).moments;
      while (gi < g_count && grid[gi] <= obs.time + kTimeEps) {
        emit(gi, m);
        ++gi;
      }
    }
    while (gi < g_count) {
      advance_to(grid[gi]);
      emit(gi, m);
      ++gi;
    }
  }

  TrajectoryBands bands;
  bands.times = grid;
  bands.mean.resize(static_cast<Eigen::Index>(g_count), n);
  bands.lo95.resize(static_cast<Eigen::Index>(g_count), n);
  bands.hi95.resize(static_cast<Eigen::Index>(g_count), n);
  std::vector<double> column(static_cast<std::size_t>(num_draws));
  for (std::size_t g = 0; g < g_count; ++g) {
    for (int j = 0; j < n; ++j) {
      for (int d = 0; d < num_draws; ++d) column[static_cast<std::size_t>(d)] = draws[g](d, j);
      std::sort(column.begin(), column.end());
      bands.mean(static_cast<Eigen::Index>(g), j) = draws[g].col(j).mean();
      bands.lo95(static_cast<Eigen::Index>(g), j) = quantile_sorted(column, 0.025);
      bands.hi95(static_cast<Eigen::Index>(g), j) = quantile_sorted(column, 0.975);
    }
  }
  return bands;
}

}  // namespace srnbayes
