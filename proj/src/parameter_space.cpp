#include "srnbayes/model/parameter_space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "srnbayes/error.hpp"

namespace srnbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;

double softplus(double x) { return std::log1p(std::exp(-std::abs(x))) + std::max(x, 0.0); }

double sigmoid(double x) { return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x)); }

double forward(const ParamSpec& p, double theta) {
  switch (p.transform) {
    case Transform::Identity:
      return theta;
    case Transform::Log:
      if (theta <= 0.0) throw std::domain_error("to_unconstrained: log transform of theta <= 0");
      return std::log(theta);
    case Transform::Logit: {
      if (theta <= p.lo || theta >= p.hi) {
        throw std::domain_error("to_unconstrained: logit transform outside (lo, hi)");
      }
      const double u = (theta - p.lo) / (p.hi - p.lo);
      return std::log(u) - std::log1p(-u);
    }
  }
  return theta;
}

double backward(const ParamSpec& p, double phi) {
  switch (p.transform) {
    case Transform::Identity:
      return phi;
    case Transform::Log:
      return std::exp(phi);
    case Transform::Logit:
      return p.lo + (p.hi - p.lo) * sigmoid(phi);
  }
  return phi;
}

// log |d theta / d phi|
double log_jacobian(const ParamSpec& p, double phi) {
  switch (p.transform) {
    case Transform::Identity:
      return 0.0;
    case Transform::Log:
      return phi;
    case Transform::Logit:
      return std::log(p.hi - p.lo) - softplus(phi) - softplus(-phi);
  }
  return 0.0;
}

}  // namespace

double Prior::log_density(double theta) const {
  if (type == Type::Uniform) {
    if (theta <= a || theta >= b) return kNegInf;
    return -std::log(b - a);
  }
  const double z = (theta - mu) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double Prior::sample(RngStream& rng) const {
  if (type == Type::Uniform) return a + (b - a) * rng.uniform01();
  return mu + sd * rng.normal();
}

ParameterSpace::ParameterSpace(std::vector<ParamSpec> specs) : specs_(std::move(specs)) {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const auto& p = specs_[i];
    if (p.fixed) continue;
    if (p.prior.type == Prior::Type::Uniform && p.prior.b <= p.prior.a) {
      throw ConfigError("parameters." + p.name, "uniform prior needs a < b");
    }
    if (p.transform == Transform::Identity && p.prior.type != Prior::Type::Gaussian) {
      throw ConfigError("parameters." + p.name,
                        "identity transform needs a prior supported on the whole real line");
    }
    if (p.transform == Transform::Log && p.prior.type == Prior::Type::Uniform &&
        p.prior.a < 0.0) {
      throw ConfigError("parameters." + p.name, "log transform needs a nonnegative support");
    }
    if (p.transform == Transform::Logit &&
        (p.hi <= p.lo ||
         (p.prior.type == Prior::Type::Uniform && (p.prior.a < p.lo || p.prior.b > p.hi)))) {
      throw ConfigError("parameters." + p.name, "logit bounds must cover the prior support");
    }
    free_.push_back(static_cast<int>(i));
  }
  if (free_.empty()) throw ConfigError("parameters", "no free parameters to infer");
}

std::vector<std::string> ParameterSpace::free_names() const {
  std::vector<std::string> out;
  for (int i : free_) out.push_back(specs_[i].name);
  return out;
}

int ParameterSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    if (specs_[i].name == name) return static_cast<int>(i);
  }
  throw ConfigError("parameters", "unknown parameter name: " + name);
}

Eigen::VectorXd ParameterSpace::to_unconstrained(const Eigen::VectorXd& theta_free) const {
  if (theta_free.size() != free_dim()) throw DimensionMismatch("to_unconstrained: dimension");
  Eigen::VectorXd phi(free_dim());
  for (int k = 0; k < free_dim(); ++k) phi(k) = forward(free_spec(k), theta_free(k));
  return phi;
}

Eigen::VectorXd ParameterSpace::to_constrained(const Eigen::VectorXd& phi) const {
  if (phi.size() != free_dim()) throw DimensionMismatch("to_constrained: dimension");
  Eigen::VectorXd theta(free_dim());
  for (int k = 0; k < free_dim(); ++k) theta(k) = backward(free_spec(k), phi(k));
  return theta;
}

double ParameterSpace::log_prior_unconstrained(const Eigen::VectorXd& phi) const {
  if (phi.size() != free_dim()) throw DimensionMismatch("log_prior_unconstrained: dimension");
  double total = 0.0;
  for (int k = 0; k < free_dim(); ++k) {
    const auto& p = free_spec(k);
    if (!std::isfinite(phi(k))) return kNegInf;
    const double theta = backward(p, phi(k));
    const double lp = p.prior.log_density(theta);
    if (!std::isfinite(lp)) return kNegInf;
    total += lp + log_jacobian(p, phi(k));
  }
  return total;
}

double ParameterSpace::log_prior_constrained(const Eigen::VectorXd& theta_free) const {
  double total = 0.0;
  for (int k = 0; k < free_dim(); ++k) {
    total += free_spec(k).prior.log_density(theta_free(k));
  }
  return total;
}

bool ParameterSpace::in_support(const Eigen::VectorXd& theta_free) const {
  return std::isfinite(log_prior_constrained(theta_free));
}

Eigen::VectorXd ParameterSpace::full_params(const Eigen::VectorXd& theta_free) const {
  Eigen::VectorXd full(total_dim());
  int k = 0;
  for (int i = 0; i < total_dim(); ++i) {
    full(i) = specs_[i].fixed ? *specs_[i].fixed : theta_free(k++);
  }
  return full;
}

Eigen::VectorXd ParameterSpace::full_params_unconstrained(const Eigen::VectorXd& phi) const {
  return full_params(to_constrained(phi));
}

Eigen::VectorXd ParameterSpace::true_values_free(const Eigen::VectorXd& full_true) const {
  if (full_true.size() != total_dim()) throw DimensionMismatch("true_values_free: dimension");
  Eigen::VectorXd out(free_dim());
  for (int k = 0; k < free_dim(); ++k) out(k) = full_true(free_[k]);
  return out;
}

Eigen::VectorXd ParameterSpace::draw_prior_free(RngStream& rng) const {
  Eigen::VectorXd theta(free_dim());
  for (int k = 0; k < free_dim(); ++k) theta(k) = free_spec(k).prior.sample(rng);
  return theta;
}

}  // namespace srnbayes
