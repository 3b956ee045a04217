#include "srnbayes/numerics/finite_diff.hpp"

#include <cmath>
#include <string>

#include "srnbayes/error.hpp"

namespace srnbayes {

namespace {

double eval_checked(const ScalarField& f, const Eigen::VectorXd& x, int coord) {
  const double v = f(x);
  if (!std::isfinite(v)) {
    throw NonFiniteEvaluation(coord, "finite differences: non-finite value at stencil of coordinate " +
                                         std::to_string(coord));
  }
  return v;
}

double step_for(const Eigen::VectorXd& theta, int k, double h_rel) {
  return h_rel * std::max(1.0, std::abs(theta(k)));
}

}  // namespace

Eigen::VectorXd grad_fd(const ScalarField& f, const Eigen::VectorXd& theta, double h_rel) {
  const auto n = theta.size();
  Eigen::VectorXd g(n);
  Eigen::VectorXd x = theta;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = step_for(theta, static_cast<int>(k), h_rel);
    x(k) = theta(k) + h;
    const double fp = eval_checked(f, x, static_cast<int>(k));
    x(k) = theta(k) - h;
    const double fm = eval_checked(f, x, static_cast<int>(k));
    x(k) = theta(k);
    g(k) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd hess_fd(const ScalarField& f, const Eigen::VectorXd& theta, double h_rel,
                        bool symmetrize) {
  const auto n = theta.size();
  Eigen::MatrixXd H(n, n);
  Eigen::VectorXd x = theta;
  const double f0 = eval_checked(f, x, -1);

  for (Eigen::Index j = 0; j < n; ++j) {
    const double hj = step_for(theta, static_cast<int>(j), h_rel);
    x(j) = theta(j) + hj;
    const double fp = eval_checked(f, x, static_cast<int>(j));
    x(j) = theta(j) - hj;
    const double fm = eval_checked(f, x, static_cast<int>(j));
    x(j) = theta(j);
    H(j, j) = (fp - 2.0 * f0 + fm) / (hj * hj);
  }

  for (Eigen::Index j = 0; j < n; ++j) {
    const double hj = step_for(theta, static_cast<int>(j), h_rel);
    for (Eigen::Index k = j + 1; k < n; ++k) {
      const double hk = step_for(theta, static_cast<int>(k), h_rel);
      x(j) = theta(j) + hj;
      x(k) = theta(k) + hk;
      const double fpp = eval_checked(f, x, static_cast<int>(k));
      x(k) = theta(k) - hk;
      const double fpm = eval_checked(f, x, static_cast<int>(k));
      x(j) = theta(j) - hj;
      const double fmm = eval_checked(f, x, static_cast<int>(k));
      x(k) = theta(k) + hk;
      const double fmp = eval_checked(f, x, static_cast<int>(k));
      x(j) = theta(j);
      x(k) = theta(k);
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * hj * hk);
      H(j, k) = v;
      H(k, j) = v;
    }
  }

  if (symmetrize) H = 0.5 * (H + H.transpose()).eval();
  return H;
}

}  // namespace srnbayes
