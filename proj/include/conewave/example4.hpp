#pragma once

#include <cstdint>

#include "conewave/hypotheses.hpp"
#include "conewave/operators.hpp"
#include "conewave/problem.hpp"
#include "conewave/solver.hpp"

namespace conewave {
namespace example4 {

// The worked instance: u_tt - u_xx = |u|^p on [0,1] with
// u0 = x(1-x)^2/10, u1 = x(1-x)^2/50, mixed Dirichlet/Neumann boundary.

/// h(t) = log((1 + sqrt2 t^4 + t^8) / (1 - sqrt2 t^4 + t^8))
double h_func(double t);
/// l(t) = atan(sqrt2 t^4 / (1 - t^8)), principal branch; l(1) is the
/// one-sided limit pi/2.
double l_func(double t);
double h_prime(double t);
double l_prime(double t);

/// Antiderivative of 1/(1+z^4).  The principal-branch closed form
///   log((1+sqrt2 z+z^2)/(1-sqrt2 z+z^2))/(4 sqrt2) + atan(sqrt2 z/(1-z^2))/(2 sqrt2)
/// jumps by -pi/(2 sqrt2) at z = 1; the corrected variant adds that constant
/// back for z > 1, giving the true continuous antiderivative vanishing at 0.
double quartic_antiderivative(double z, bool corrected);

struct BSearchResult {
  double B = 0.0;
  double argmax = 0.0;
};

/// Supremum of (1 + t + t^2 + t^3 + t^4) (h(t)/(16 sqrt2) + l(t)/(8 sqrt2))
/// over t >= 0 (principal branch), located by grid search on [0, 10] with
/// golden-section refinement.  Attained as t -> 1^-.
BSearchResult compute_B(int search_points = 10001);

struct Constants {
  double p = 2.0;
  double B = 0.0;
  double argmax_B = 0.0;
  double epsilon = 0.5;
  double m = 0.5;
  double r = 4.0 / 27.0;
  double b1 = 0.0;
  double A = 0.0;
  double R = 0.0;
  // b1 = B * b1_over_B_num / b1_over_B_den, assembled in integer arithmetic
  std::uint64_t b1_over_B_num = 0;
  std::uint64_t b1_over_B_den = 32;

  HypothesisConstants hypothesis() const {
    return {epsilon, A, R, r, b1, m};
  }
};

/// eps = 1/2, m = 1/2, r = 4/27, b1 = B 15^2 (2^16+3^16)(2^2+3^2) 3^4 / 2^5,
/// A = 1/(20 b1), R = 2 (eps r + 4 (r + r^p) A) / (eps - 4A).
Constants build_constants(double p = 2.0);

/// g(t, x) = (A / 200B) t^3 / ((1 + t^16)(1 + t^2)), x-independent.
Expr build_g(const Constants& c);
double g_coefficient(const Constants& c);  // A / (200 B)

/// Full problem instance ready for certify/solve.
ProblemSpec build_problem(double p = 2.0, double t_max = 2.0, int nt = 257, int nx = 257);

struct ReproduceOptions {
  double p = 2.0;
  double t_max = 2.0;
  int nt = 257;
  int nx = 257;
  double extended_t_max = 50.0;  // window for the growth-violation finding
  int bound_trials = 100;
  int lipschitz_pairs = 100;
  std::uint64_t seed = 42;
};

struct ChainH4i {
  double measured_sup = 0.0;          // sup of the first growth inequality LHS
  double measured_over_A = 0.0;
  double paper_chain_bound = 0.0;     // A/100, from the closed-form chain
  bool within_paper_chain = false;
  double first_crossing_extended = 0.0;  // violation time on the extended window
};

struct ChainH4iii {
  double measured_lhs = 0.0;
  double paper_intermediate = 0.0;  // the displayed product ending at A/b1
  double a_over_b1 = 0.0;
  double intermediate_rel_diff = 0.0;
  bool chain_holds = false;
};

struct Report {
  Constants constants;
  Certificate certificate;
  ChainH4i h4i;
  ChainH4iii h4iii;
  SolveReport solve;
  TheoremAudit theorem;
  Lemma1Audit lemma1;
  LipschitzProbe lipschitz;
  int bound_violations = 0;
  int bound_checks = 0;
  // special-function findings
  double h_at_1 = 0.0;
  double h_at_1_fourth_root_variant = 0.0;  // the printed value; suspected typo
  double sup_check_t4h = 0.0;               // t^4 h(t) at t = 100, limit 2 sqrt2
  double sup_check_t4l = 0.0;               // t^4 l(t) at t = 100, limit -sqrt2
  double g_mass_two_paths_rel_diff = 0.0;
  ReproduceOptions options;
};

/// Runs the whole worked example end to end: constants, certificate, solve,
/// audits, bound suites, and the displayed inequality chains with measured
/// values.
Report reproduce(const ReproduceOptions& opt = {});

}  // namespace example4
}  // namespace conewave
