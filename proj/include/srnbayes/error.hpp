#pragma once

#include <stdexcept>
#include <string>

namespace srnbayes {

/// Base class for recoverable numerical failures. Samplers catch this and
/// translate it into a -inf log-density or a failed replication.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class IntegrationDiverged : public NumericalError {
 public:
  IntegrationDiverged(double at_time, const std::string& what)
      : NumericalError(what), at_time_(at_time) {}
  double at_time() const { return at_time_; }

 private:
  double at_time_;
};

class NotPositiveSemidefinite : public NumericalError {
 public:
  explicit NotPositiveSemidefinite(const std::string& what) : NumericalError(what) {}
};

/// State handed to a rate law was negative beyond the clamping tolerance.
class StateDomainError : public NumericalError {
 public:
  explicit StateDomainError(const std::string& what) : NumericalError(what) {}
};

class DimensionMismatch : public std::invalid_argument {
 public:
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A finite-difference stencil point evaluated to a non-finite value.
class NonFiniteEvaluation : public NumericalError {
 public:
  NonFiniteEvaluation(int coordinate, const std::string& what)
      : NumericalError(what), coordinate_(coordinate) {}
  int coordinate() const { return coordinate_; }

 private:
  int coordinate_;
};

/// ABC rejection gave up: acceptance rate fell below the feasibility floor.
class InfeasibleThreshold : public NumericalError {
 public:
  explicit InfeasibleThreshold(const std::string& what) : NumericalError(what) {}
};

/// ABC-SMC particle weights collapsed (effective sample size < 2).
class DegenerateWeights : public NumericalError {
 public:
  DegenerateWeights(int population, const std::string& what)
      : NumericalError(what), population_(population) {}
  int population() const { return population_; }

 private:
  int population_;
};

/// Invalid experiment configuration; `field()` is the offending field path.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace srnbayes
