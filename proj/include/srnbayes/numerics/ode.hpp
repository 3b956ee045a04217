#pragma once

#include <Eigen/Dense>
#include <functional>

namespace srnbayes {

/// dy = f(t, y); writes the derivative into the third argument.
using VectorField = std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Classical fixed-step RK4 over [t0, t1] with (t1 - t0) / substeps per step.
/// t1 == t0 returns y0 unchanged. Throws IntegrationDiverged with the failing
/// sub-time if the state goes non-finite.
Eigen::VectorXd rk4_integrate(const VectorField& f, const Eigen::VectorXd& y0, double t0,
                              double t1, int substeps);

/// Reusable scratch for tight integration loops (no per-step allocation).
class Rk4Workspace {
 public:
  /// Advances y in place by one RK4 step of size h starting at time t.
  void step(const VectorField& f, double t, double h, Eigen::VectorXd& y);

 private:
  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace srnbayes
