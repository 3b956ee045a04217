#pragma once

// Independent continuous-discrete Kalman filter for the scalar
// immigration-death network (0 -> X at rate theta1, X -> 0 at rate theta2 x).
// Moment propagation uses the closed-form solutions of
//   dm/dt = theta1 - theta2 m,
//   dP/dt = -2 theta2 P + (theta1 + theta2 m(t)) / Omega,
// so it shares no code with the RK4-based filter it checks.

#include <cmath>
#include <vector>

namespace oracle {

struct ScalarKalman {
  double theta1 = 1.0;
  double theta2 = 0.5;
  double omega = 1.0;

  void propagate(double dt, double& m, double& P) const {
    const double mu = theta1 / theta2;
    const double em = std::exp(-theta2 * dt);
    const double e2 = std::exp(-2.0 * theta2 * dt);
    const double m0 = m;
    m = mu + (m0 - mu) * em;
    P = e2 * P + (mu * (1.0 - e2) + (m0 - mu) * (em - e2)) / omega;
  }

  // Returns the predictive log-density of y; updates (m, P) in place.
  double update(double y, double sigma_sd, double& m, double& P) const {
    const double S = P + sigma_sd * sigma_sd;
    const double resid = y - m;
    const double loglik =
        -0.5 * (std::log(2.0 * M_PI) + std::log(S) + resid * resid / S);
    const double K = P / S;
    m += K * resid;
    P -= K * P;
    return loglik;
  }

  struct Step {
    double mean;
    double var;  // full covariance (Omega^{-1} Gamma in the filter's scaling)
    double predictive_loglik;
  };

  // Filters a full observation record: first observation assimilated from the
  // initial moments, then alternate propagate/update.
  std::vector<Step> filter(double m0, double P0, const std::vector<double>& times,
                           const std::vector<double>& ys, double sigma_sd) const {
    std::vector<Step> steps;
    double m = m0, P = P0;
    double t = times.front();
    for (std::size_t h = 0; h < times.size(); ++h) {
      if (times[h] > t) {
        propagate(times[h] - t, m, P);
        t = times[h];
      }
      const double ll = update(ys[h], sigma_sd, m, P);
      steps.push_back({m, P, ll});
    }
    return steps;
  }
};

}  // namespace oracle
