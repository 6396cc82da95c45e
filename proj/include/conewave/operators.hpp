#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conewave/grid.hpp"
#include "conewave/problem.hpp"

namespace conewave {

/// Sampled problem data shared by all operator applications on one grid.
struct OperatorContext {
  ProblemSpec problem;
  RectGrid grid;
  Field g_field;                 // g sampled on the grid, >= 0
  std::vector<Field> c_fields;   // c_j sampled, >= 0
  Eigen::VectorXd u0_vec;        // u0 at the x nodes
  Eigen::VectorXd u1_vec;        // u1 at the x nodes
  /// cj_mass[j][i] = int_0^{t_i} int_0^L c_j dx dt
  std::vector<Eigen::VectorXd> cj_mass;
};

OperatorContext make_context(const ProblemSpec& spec, const RectGrid& grid);

// The integral operators.  With K(t,t1,x,x1) = (t-t1)^2 (x-x1)^2:
//
//   Gu(t,x)  = -1/4 int_0^t int_0^x K g(t1,x1) int_0^{t1} (t1-t2) u(t2,x1) dt2 dx1 dt1
//   F1u(t,x) = int_0^x x1 ( -u(t,x1) + u0(x1) + t u1(x1)
//                           + int_0^t (t-t1) f(t1,x1,u(t1,x1)) dt1 ) dx1
//   F2u(t,x) = the same integrand without the x1 weight, integrated over [x, L]
//   F3u      = F1u + x F2u
//   Fu(t,x)  = 1/4 int_0^t int_0^x K g(t1,x1) F3u(t1,x1) dx1 dt1
//
// Everything is evaluated on the full grid in one pass, reusing cumulative
// moments in t and prefix integrals in x.

Field apply_G(const Field& u, const OperatorContext& ctx);
Field apply_F1(const Field& u, const OperatorContext& ctx);
Field apply_F2(const Field& u, const OperatorContext& ctx);
Field apply_F3(const Field& u, const OperatorContext& ctx);
Field apply_F(const Field& u, const OperatorContext& ctx);

/// Tu = (1-eps) u + Gu and Su = eps u + Fu; eps must lie in (0, 1).
Field apply_T(const Field& u, const OperatorContext& ctx, double eps);
Field apply_S(const Field& u, const OperatorContext& ctx, double eps);

/// Unvalidated variants, for probing degenerate eps.
Field apply_T_raw(const Field& u, const OperatorContext& ctx, double eps);
Field apply_S_raw(const Field& u, const OperatorContext& ctx, double eps);

/// Residual of the integral equation: Phi(u) = Gu + Fu, zero exactly at
/// solutions.
struct PhiResidual {
  Field field;
  double sup = 0.0;
  GridLoc where;
};
PhiResidual residual_phi(const Field& u, const OperatorContext& ctx);

// ---------------------------------------------------------------------------
// Bound suites

struct BoundCheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  double slack = 0.0;    // bound - measured
  GridLoc witness;       // where the measured sup is attained
  std::string witness_component;
  bool pass = false;
};

/// Deterministic smooth trial field: a seeded Fourier-polynomial combination
/// rescaled to the requested norm total.
Field random_smooth_field(const RectGrid& grid, std::uint64_t seed, double target_norm);

/// Checks |Gu| <= 4 r A over seeded trial fields with |u| = r.
std::vector<BoundCheckResult> bound_check_G(int trials, const OperatorContext& ctx, double r,
                                            double A, std::uint64_t seed);

/// Checks |Fu| <= 4 (r + sum_j r^{p_j}) A, plus the pointwise envelopes
///   |F1u| <= 2 L^2 r (1+t) +  L t sum_j r^{p_j} C_j(t)
///   |F2u| <= 2 L   r (1+t) +    t sum_j r^{p_j} C_j(t)
///   |F3u| <= 4 L^2 r (1+t) + 2 L t sum_j r^{p_j} C_j(t)
/// with C_j(t) = int_0^L int_0^t c_j.
std::vector<BoundCheckResult> bound_check_F(int trials, const OperatorContext& ctx, double r,
                                            double A, std::uint64_t seed);

struct LipschitzProbe {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  int pairs_used = 0;
  int degenerate_skipped = 0;
};

/// Distortion ratios |(I-T)u - (I-T)v| / |u - v| over seeded random pairs
/// with norms <= R; the two-sided bound is [eps - 4A, eps + 4A].
LipschitzProbe lipschitz_probe(int pairs, const OperatorContext& ctx, double eps, double R,
                               std::uint64_t seed);

}  // namespace conewave
