#include "conewave/problem.hpp"

#include <cmath>
#include <stdexcept>

namespace conewave {

double ProblemSpec::sum_r_pow() const {
  double s = 0.0;
  for (const auto& term : growth) s += std::pow(constants.r, term.p);
  return s;
}

void ProblemSpec::validate() const {
  if (!(L > 0.0)) throw std::invalid_argument("spec: L must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("spec: t_max must be positive");
  if (growth.empty()) throw std::invalid_argument("spec: at least one growth term required");
  for (const auto& term : growth) {
    if (!(term.p > 0.0)) throw std::invalid_argument("spec: growth exponents must be positive");
    if (term.c.empty() || !check_vars(term.c, kVarsTX))
      throw std::invalid_argument("spec: growth coefficients must be expressions over {t, x}");
  }
  if (f.empty() || !check_vars(f, kVarsTXU))
    throw std::invalid_argument("spec: f must be an expression over {t, x, u}");
  if (u0.empty() || !check_vars(u0, kVarX))
    throw std::invalid_argument("spec: u0 must be an expression over {x}");
  if (u1.empty() || !check_vars(u1, kVarX))
    throw std::invalid_argument("spec: u1 must be an expression over {x}");
  if (g.empty() || !check_vars(g, kVarsTX))
    throw std::invalid_argument("spec: g must be an expression over {t, x}");
  make_grid().validate();
  if (!(constants.r > 0.0 && constants.r < 1.0))
    throw std::invalid_argument("spec: r must lie in (0, 1)");
}

}  // namespace conewave
