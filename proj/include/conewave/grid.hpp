#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "conewave/expr.hpp"

namespace conewave {

/// Uniform grid on [0, t_max] x [0, L]; node (i, j) sits at (i*dt, j*dx).
struct RectGrid {
  double t_max = 2.0;
  int nt = 257;
  double L = 1.0;
  int nx = 257;

  double dt() const { return t_max / (nt - 1); }
  double dx() const { return L / (nx - 1); }
  double t(int i) const { return i * dt(); }
  double x(int j) const { return j * dx(); }

  void validate() const;  // throws std::invalid_argument
  bool operator==(const RectGrid&) const = default;
};

struct GridLoc {
  int i = 0;
  int j = 0;
  double t = 0.0;
  double x = 0.0;
};

/// Components of the norm |u| + |u_t| + |u_tt| + |u_x| + |u_xx| (sup norms
/// over the grid).  Computed on [0, t_max] only, so it under-approximates a
/// supremum taken over all t >= 0.
struct EnormBreakdown {
  double sup_u = 0.0;
  double sup_ut = 0.0;
  double sup_utt = 0.0;
  double sup_ux = 0.0;
  double sup_uxx = 0.0;
  double total = 0.0;
};

enum class Partial { T, X, TT, XX };

/// Real-valued function sampled on a RectGrid.  values(i, j) is the value at
/// (t_i, x_j); rows run over time. Fields are immutable by convention after
/// they are filled.
struct Field {
  RectGrid grid;
  Eigen::ArrayXXd values;

  Field() = default;
  explicit Field(const RectGrid& g) : grid(g), values(Eigen::ArrayXXd::Zero(g.nt, g.nx)) {}
  Field(const RectGrid& g, Eigen::ArrayXXd v) : grid(g), values(std::move(v)) {}

  double operator()(int i, int j) const { return values(i, j); }
  bool all_finite() const { return values.isFinite().all(); }
};

/// Samples an expression over t and x.  Evaluation errors are rethrown with
/// the grid location appended.
Field sample(const Expr& e, const RectGrid& grid);

/// Finite-difference partial derivative: central differences at interior
/// nodes, second-order one-sided stencils at the boundary rows/columns.
/// Exact to rounding for polynomials of degree <= 2 in the differentiated
/// variable.
Field partial(const Field& f, Partial which);

EnormBreakdown e_norm(const Field& f);

/// Max of |f| over the grid; optionally reports where it is attained.
double sup_abs(const Field& f, GridLoc* where = nullptr);

/// Bilinear interpolation; exact at nodes. Throws std::domain_error outside
/// the grid rectangle.
double interp(const Field& f, double t, double x);

/// CSV export: header "t,x,value", row-major by t then x, 17 significant
/// digits.
void write_csv(const Field& f, std::ostream& os);
std::string to_csv(const Field& f);

}  // namespace conewave
