#pragma once

#include <optional>
#include <string>
#include <vector>

#include "conewave/problem.hpp"

namespace conewave {

/// One verified inequality: `lhs relation rhs` with measured sides.  slack is
/// the pass margin (rhs - lhs for <=-type, lhs - rhs for >=-type); strict
/// inequalities require slack > 1e-12 * scale, non-strict allow equality to
/// the same tolerance.
struct CheckRecord {
  std::string name;
  double lhs = 0.0;
  std::string relation;  // "<=", "<", ">=", ">"
  double rhs = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::string location;  // worst-case location, empty when not applicable
  std::string note;
};

CheckRecord make_check(const std::string& name, double lhs, const std::string& relation,
                       double rhs, const std::string& location = "",
                       const std::string& note = "");

/// Behaviour of the first growth inequality at the edge of the window, plus
/// crossing information when the inequality fails in range or a quartic
/// growth fit predicts a failure beyond it.
struct H4Diagnostic {
  double sup = 0.0;
  double sup_t = 0.0;
  bool increasing_at_t_max = false;
  std::optional<double> first_crossing_t;         // in-range violation
  std::optional<double> extrapolated_crossing_t;  // t^4-fit prediction beyond t_max
};

struct CertifyOptions {
  int h1_samples_t = 33;
  int h1_samples_x = 33;
  int h1_samples_u = 65;
  int h2_samples = 4097;   // dense 1-D grid for range checks
  int h4_samples = 0;      // 0 = choose from t_max
  double strict_tol = 1e-12;
};

struct Certificate {
  std::vector<CheckRecord> checks;
  bool overall_pass = false;
  std::optional<H4Diagnostic> h4_diagnostic;
  std::string error;  // non-empty when a hard error aborted the run

  // provenance
  RectGrid grid;
  double t_max = 0.0;
  int h4_samples = 0;
  CertifyOptions options;
  std::string quadrature = "prefix-deg4 + gauss8";
};

/// B1 = max{1, 2L, 2L^2, 2L^3, 2L^4}.
double compute_B1(double L);

std::vector<CheckRecord> check_H1(const ProblemSpec& spec, const CertifyOptions& opt);
std::vector<CheckRecord> check_H2(const ProblemSpec& spec, const CertifyOptions& opt);
std::vector<CheckRecord> check_H3(const HypothesisConstants& c, const std::vector<double>& p_list,
                                  double r, const CertifyOptions& opt = {});
std::vector<CheckRecord> check_H4(const ProblemSpec& spec, double t_max, const CertifyOptions& opt,
                                  H4Diagnostic* diagnostic = nullptr);

/// Runs every hypothesis check and aggregates the records.  A hard error in
/// one check aborts the remaining ones; the partial certificate carries the
/// message.
Certificate certify(const ProblemSpec& spec, const CertifyOptions& opt = {});

}  // namespace conewave
