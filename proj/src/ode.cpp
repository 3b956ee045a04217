#include "srnbayes/numerics/ode.hpp"

#include <stdexcept>

#include "srnbayes/error.hpp"

namespace srnbayes {

void Rk4Workspace::step(const VectorField& f, double t, double h, Eigen::VectorXd& y) {
  const auto n = y.size();
  k1_.resize(n);
  k2_.resize(n);
  k3_.resize(n);
  k4_.resize(n);
  tmp_.resize(n);

  f(t, y, k1_);
  tmp_ = y + 0.5 * h * k1_;
  f(t + 0.5 * h, tmp_, k2_);
  tmp_ = y + 0.5 * h * k2_;
  f(t + 0.5 * h, tmp_, k3_);
  tmp_ = y + h * k3_;
  f(t + h, tmp_, k4_);
  y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
}

Eigen::VectorXd rk4_integrate(const VectorField& f, const Eigen::VectorXd& y0, double t0,
                              double t1, int substeps) {
  if (t1 < t0) throw std::invalid_argument("rk4_integrate: t1 < t0");
  if (substeps < 1) throw std::invalid_argument("rk4_integrate: substeps < 1");
  if (t1 == t0) return y0;

  Eigen::VectorXd y = y0;
  Rk4Workspace ws;
  const double h = (t1 - t0) / substeps;
  for (int i = 0; i < substeps; ++i) {
    const double t = t0 + i * h;
    ws.step(f, t, h, y);
    if (!y.allFinite()) {
      throw IntegrationDiverged(t + h, "rk4_integrate: non-finite state at t=" +
                                           std::to_string(t + h));
    }
  }
  return y;
}

}  // namespace srnbayes
