#pragma once

#include <Eigen/Dense>
#include <functional>

namespace srnbayes {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Central differences with per-coordinate step h_k = h_rel * max(1, |theta_k|).
/// Throws NonFiniteEvaluation (carrying the coordinate) if a stencil point is
/// non-finite.
Eigen::VectorXd grad_fd(const ScalarField& f, const Eigen::VectorXd& theta,
                        double h_rel = 1e-5);

/// Central second differences; the result is symmetrized as (H + H^T) / 2
/// unless symmetrize is false (off-diagonal stencils are shared, so the raw
/// matrix is already symmetric).
Eigen::MatrixXd hess_fd(const ScalarField& f, const Eigen::VectorXd& theta,
                        double h_rel = 1e-5, bool symmetrize = true);

}  // namespace srnbayes
