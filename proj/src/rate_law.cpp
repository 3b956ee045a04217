#include "srnbayes/model/rate_law.hpp"

#include <algorithm>
#include <cmath>

namespace srnbayes {

namespace {

double mass_action_value(const MassAction& law, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& theta) {
  double v = theta(law.param);
  for (const auto& [j, mult] : law.reactants) {
    for (int m = 0; m < mult; ++m) v *= s(j);
  }
  return v;
}

}  // namespace

double rate_value(const RateLaw& law, const Eigen::VectorXd& s, const Eigen::VectorXd& theta) {
  return std::visit(
      [&](const auto& l) -> double {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MassAction>) {
          return mass_action_value(l, s, theta);
        } else if constexpr (std::is_same_v<T, CombinatorialMassAction>) {
          const double x = s(l.species);
          return x >= 1.0 ? 0.5 * theta(l.param) * x * (x - 1.0) : 0.0;
        } else if constexpr (std::is_same_v<T, ConservedComplement>) {
          return theta(l.param) * std::max(l.zeta - s(l.species), 0.0);
        } else {
          double v = theta(l.vmax_param);
          for (const auto& [j, km] : l.factors) v *= s(j) / (theta(km) + s(j));
          return v;
        }
      },
      law);
}

void rate_state_partials(const RateLaw& law, const Eigen::VectorXd& s,
                         const Eigen::VectorXd& theta, Eigen::RowVectorXd& row) {
  row.setZero();
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MassAction>) {
          // d/ds_j = theta * mult_j * s_j^(mult_j-1) * prod_{l != j} s_l^mult_l
          for (std::size_t a = 0; a < l.reactants.size(); ++a) {
            const auto [j, mult] = l.reactants[a];
            double d = theta(l.param) * mult;
            for (int m = 0; m < mult - 1; ++m) d *= s(j);
            for (std::size_t b = 0; b < l.reactants.size(); ++b) {
              if (b == a) continue;
              const auto [jb, mb] = l.reactants[b];
              for (int m = 0; m < mb; ++m) d *= s(jb);
            }
            row(j) += d;
          }
        } else if constexpr (std::is_same_v<T, CombinatorialMassAction>) {
          const double x = s(l.species);
          if (x >= 1.0) row(l.species) = 0.5 * theta(l.param) * (2.0 * x - 1.0);
        } else if constexpr (std::is_same_v<T, ConservedComplement>) {
          if (s(l.species) < l.zeta) row(l.species) = -theta(l.param);
        } else {
          // d/ds_f = Vmax * Km_f / (Km_f + s_f)^2 * prod_{l != f} s_l / (Km_l + s_l)
          for (std::size_t a = 0; a < l.factors.size(); ++a) {
            const auto [j, km] = l.factors[a];
            const double denom = theta(km) + s(j);
            double d = theta(l.vmax_param) * theta(km) / (denom * denom);
            for (std::size_t b = 0; b < l.factors.size(); ++b) {
              if (b == a) continue;
              const auto [jb, kb] = l.factors[b];
              d *= s(jb) / (theta(kb) + s(jb));
            }
            row(j) += d;
          }
        }
      },
      law);
}

int rate_law_max_param(const RateLaw& law) {
  return std::visit(
      [](const auto& l) -> int {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MassAction>) {
          return l.param;
        } else if constexpr (std::is_same_v<T, CombinatorialMassAction>) {
          return l.param;
        } else if constexpr (std::is_same_v<T, ConservedComplement>) {
          return l.param;
        } else {
          int m = l.vmax_param;
          for (const auto& [j, km] : l.factors) m = std::max(m, km);
          return m;
        }
      },
      law);
}

int rate_law_max_species(const RateLaw& law) {
  return std::visit(
      [](const auto& l) -> int {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MassAction>) {
          int m = -1;
          for (const auto& [j, mult] : l.reactants) m = std::max(m, j);
          return m;
        } else if constexpr (std::is_same_v<T, CombinatorialMassAction>) {
          return l.species;
        } else if constexpr (std::is_same_v<T, ConservedComplement>) {
          return l.species;
        } else {
          int m = -1;
          for (const auto& [j, km] : l.factors) m = std::max(m, j);
          return m;
        }
      },
      law);
}

}  // namespace srnbayes
