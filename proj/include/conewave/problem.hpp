#pragma once

#include <string>
#include <vector>

#include "conewave/expr.hpp"
#include "conewave/grid.hpp"

namespace conewave {

/// Constants entering the smallness and separation inequalities.
struct HypothesisConstants {
  double epsilon = 0.0;
  double A = 0.0;
  double R = 0.0;
  double r = 0.0;
  double b1 = 0.0;
  double m = 0.0;
};

/// One growth term c_j(t, x) * |u|^{p_j} of the nonlinearity envelope.
struct GrowthTerm {
  Expr c;        // over {t, x}
  double p = 0;  // > 0
  std::string c_source;
};

/// Expression-defined problem instance: domain length, nonlinearity f and its
/// growth envelope, initial data, weight function g, constants, and the
/// computational window / grid.
struct ProblemSpec {
  double L = 1.0;
  Expr f;   // over {t, x, u}
  std::vector<GrowthTerm> growth;
  Expr u0;  // over {x}
  Expr u1;  // over {x}
  Expr g;   // over {t, x}
  HypothesisConstants constants;
  double t_max = 2.0;
  RectGrid grid;

  // original expression sources, kept for reports
  std::string f_source, u0_source, u1_source, g_source;

  double sum_r_pow() const;  // sum_j r^{p_j}
  RectGrid make_grid() const { return {t_max, grid.nt, L, grid.nx}; }
  void validate() const;     // throws std::invalid_argument
};

}  // namespace conewave
