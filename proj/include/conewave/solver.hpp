#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conewave/operators.hpp"

namespace conewave {

/// Computed solution of the wave problem
///   u_tt - u_xx = f(t, x, u),  u(0,.) = u0,  u_t(0,.) = u1,
///   u(t, 0) = 0,               u_x(t, L) = 0
/// together with the residual and membership audit numbers.
struct SolveReport {
  Field u;
  double pde_residual_sup = 0.0;
  double eq2_residual_sup = 0.0;
  double min_u = 0.0;
  GridLoc min_loc;
  EnormBreakdown norm;
  double cfl = 0.0;  // dt/dx of the stepping grid, <= 1
  int substeps = 1;  // time steps taken per output row

  // pointwise membership margins for the invariant set audit
  double max_u_minus_u0 = 0.0;        // over t > 0
  double max_u_minus_m_u0 = 0.0;      // over t in [1, 2] (clipped to the window)
  double norm_margin_vs_r = 0.0;      // r - |u|
};

class SolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit leapfrog with a Dirichlet row at x = 0 and a ghost-node Neumann
/// closure at x = L.  Output rows are exact step snapshots: when the output
/// spacing dt_out exceeds cfl * dx the march takes
/// ceil(dt_out / (cfl * dx)) equal substeps per row, so the stability bound
/// holds for any output grid.  First step by a second-order Taylor start.
SolveReport solve_fd(const ProblemSpec& spec, const RectGrid& grid, double cfl = 0.9);

/// d'Alembert evaluation through the extension of the data that is odd about
/// x = 0 and even about x = L (period 4L), plus a Duhamel integral of the
/// extended frozen source when one is supplied.  Independent of the
/// finite-difference path.
double images_oracle(const ProblemSpec& spec, const Field* f_frozen, double t, double x);

/// f(t, x, u(t, x)) sampled from a computed solution, for freezing the source.
Field frozen_source(const ProblemSpec& spec, const Field& u);

/// sup over interior nodes of |u_tt - u_xx - f(t, x, u)|.
double pde_residual(const Field& u, const ProblemSpec& spec);

struct Lemma1Audit {
  double eq2_residual = 0.0;
  double pde_residual = 0.0;
  double ic_error_u0 = 0.0;   // sup |u(0,.) - u0|
  double ic_error_u1 = 0.0;   // sup |u_t(0,.) - u1|
  double bc_error_dirichlet = 0.0;  // sup |u(., 0)|
  double bc_error_neumann = 0.0;    // sup |u_x(., L)|
};

/// Numerical content of the equivalence between the integral equation and
/// the differential problem: for a purported solution both residuals and all
/// side-condition errors should be small together and shrink under
/// refinement.
Lemma1Audit lemma1_audit(const Field& u, const OperatorContext& ctx);

struct IterationHistory {
  struct Step {
    int iteration = 0;
    double residual_sup = 0.0;
    double norm_total = 0.0;
  };
  std::vector<Step> steps;
  enum class Termination { Tolerance, MaxIterations, Divergence } termination =
      Termination::MaxIterations;
};

/// Damped residual iteration u <- u + omega (Gu + Fu).  Exploratory: no
/// convergence guarantee is claimed; the run stops on tolerance, budget, or
/// when the residual exceeds 1e3 times its initial value.
IterationHistory fixed_point_iterate(const Field& u_init, const OperatorContext& ctx,
                                     double omega, double tol, int max_iter);

struct TheoremAudit {
  double min_u = 0.0;
  GridLoc min_loc;
  std::optional<double> min_u_oracle;  // method-of-images cross check
  double norm_total = 0.0;
  double r = 0.0;
  double norm_margin_vs_r = 0.0;
  double max_u_minus_u0 = 0.0;
  double max_u_minus_m_u0 = 0.0;
  std::string verdict;  // reported, never asserted
};

/// Reports the nonnegativity minimum, norm-vs-r margin, and invariant-set
/// margins of a computed solution.  With with_oracle set, re-evaluates the
/// minimum through the method of images (frozen source) as a cross check.
TheoremAudit audit_theorem(const SolveReport& report, const ProblemSpec& spec,
                           bool with_oracle = true);

}  // namespace conewave
