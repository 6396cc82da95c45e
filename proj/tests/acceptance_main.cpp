// Acceptance suite: one criterion per run (--criterion N) or all in sequence.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "conewave/cli.hpp"
#include "conewave/example4.hpp"
#include "conewave/report.hpp"
#include "conewave/solver.hpp"

using namespace conewave;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  int id;
  const char* title;
  bool (*run)(std::string& detail);
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// keeps nested CLI invocations from flooding the per-criterion output
struct CoutSilencer {
  std::stringstream sink;
  std::streambuf* saved;
  CoutSilencer() : saved(std::cout.rdbuf(sink.rdbuf())) {}
  ~CoutSilencer() { std::cout.rdbuf(saved); }
};

ProblemSpec synthetic(const std::string& f, const std::string& g, int n) {
  ProblemSpec spec;
  spec.L = 1.0;
  spec.f = parse(f);
  spec.f_source = f;
  GrowthTerm term;
  term.c = parse("1");
  term.c_source = "1";
  term.p = 2.0;
  spec.growth = {term};
  spec.u0 = parse("0");
  spec.u1 = parse("0");
  spec.g = parse(g);
  spec.g_source = g;
  spec.constants = {0.5, 1e-3, 8.0 / 27.0, 4.0 / 27.0, 10.0, 0.5};
  spec.t_max = 2.0;
  spec.grid = {2.0, n, 1.0, n};
  return spec;
}

// 1. apply_G with u = 1, g = 1, L = 1 matches -x^3 t^5/720 at 10 nodes,
//    relative error <= 1e-8; runtime < 1 s at 129x129.
bool criterion1(std::string& detail) {
  ProblemSpec spec = synthetic("0", "1", 129);
  RectGrid grid = spec.make_grid();
  OperatorContext ctx = make_context(spec, grid);
  Field u(grid);
  u.values.setConstant(1.0);
  const auto t0 = std::chrono::steady_clock::now();
  Field gu = apply_G(u, ctx);
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  int checked = 0;
  for (int k = 1; k <= 10; ++k) {
    const int i = k * 12;
    const int j = 128 - k * 11;
    const double t = grid.t(i), x = grid.x(j);
    const double exact = -x * x * x * std::pow(t, 5.0) / 720.0;
    worst = std::max(worst, std::fabs(gu.values(i, j) - exact) / std::fabs(exact));
    ++checked;
  }
  std::ostringstream os;
  os << "worst rel err " << worst << " over " << checked << " nodes, " << elapsed << " s";
  detail = os.str();
  return worst <= 1e-8 && elapsed < 1.0;
}

// 2. constructed case gives Fu(1,1) = 1/3600 within 1e-8 relative.
bool criterion2(std::string& detail) {
  ProblemSpec spec = synthetic("1", "1", 129);
  RectGrid grid = spec.make_grid();
  OperatorContext ctx = make_context(spec, grid);
  Field fu = apply_F(Field(grid), ctx);
  const double got = fu.values(64, 128);  // node (t, x) = (1, 1)
  const double rel = std::fabs(got - 1.0 / 3600.0) * 3600.0;
  std::ostringstream os;
  os << "Fu(1,1) = " << got << ", rel err " << rel;
  detail = os.str();
  return rel <= 1e-8;
}

// 3. FD sup-error ratio between 65 and 129 grids lies in [3.5, 4.5]; < 5 s.
bool criterion3(std::string& detail) {
  const auto t0 = std::chrono::steady_clock::now();
  auto err = [](int n) {
    ProblemSpec spec = synthetic("0", "0", n);
    spec.u0 = parse("sin(1.5707963267948966*x)");
    SolveReport rep = solve_fd(spec, spec.make_grid(), 0.9);
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double exact = std::sin(M_PI * rep.u.grid.x(j) / 2.0) *
                             std::cos(M_PI * rep.u.grid.t(i) / 2.0);
        worst = std::max(worst, std::fabs(rep.u.values(i, j) - exact));
      }
    return worst;
  };
  const double e65 = err(65);
  const double e129 = err(129);
  const double ratio = e65 / e129;
  const double elapsed = seconds_since(t0);
  std::ostringstream os;
  os << "sup errors " << e65 << " -> " << e129 << ", ratio " << ratio << ", " << elapsed << " s";
  detail = os.str();
  return ratio >= 3.5 && ratio <= 4.5 && elapsed < 5.0;
}

// 4. worked-problem solution at 257x257 has integral-equation residual
//    <= 1e-4, shrinking by >= 2 under grid doubling.
bool criterion4(std::string& detail) {
  auto residual = [](int n) {
    ProblemSpec spec = example4::build_problem(2.0, 2.0, n, n);
    SolveReport rep = solve_fd(spec, spec.make_grid());
    return rep.eq2_residual_sup;
  };
  const double r257 = residual(257);
  const double r513 = residual(513);
  const double ratio = r257 / r513;
  std::ostringstream os;
  os << "eq2 residual " << r257 << " at 257, " << r513 << " at 513, ratio " << ratio;
  detail = os.str();
  return r257 <= 1e-4 && ratio >= 2.0;
}

// 5. certificate with p = 2, t_max = 2: H1-H3 pass exactly, H4(i)-(iii) pass
//    by quadrature, measured H4(i) sup <= A/50, and sup u0 = 2/135 to 1e-12.
bool criterion5(std::string& detail) {
  ProblemSpec spec = example4::build_problem(2.0, 2.0, 257, 257);
  Certificate cert = certify(spec);
  bool h123 = true, h4 = true;
  double h4i_sup = 0.0, sup_u0 = 0.0;
  for (const auto& c : cert.checks) {
    if (c.name.rfind("h1_", 0) == 0 || c.name.rfind("h2_", 0) == 0 ||
        c.name.rfind("h3_", 0) == 0)
      h123 = h123 && c.pass;
    if (c.name.rfind("h4_", 0) == 0) h4 = h4 && c.pass;
    if (c.name == "h4_i_growth_vs_A") h4i_sup = c.lhs;
    if (c.name == "h2_u0_sup_below_r") sup_u0 = c.lhs;
  }
  const double A = spec.constants.A;
  const bool sup_ok = h4i_sup <= A / 50.0;
  const bool u0_ok = std::fabs(sup_u0 - 2.0 / 135.0) <= 1e-12;
  std::ostringstream os;
  os << "H1-H3 " << (h123 ? "pass" : "FAIL") << "; H4 " << (h4 ? "pass" : "FAIL")
     << "; H4(i) sup = " << h4i_sup / A << " * A (A/50 threshold "
     << (sup_ok ? "met" : "NOT met: the closed-form chain only bounds the integral below the"
                          " branch point t=1, measured sup is ~A/21.4; see ledger")
     << "); sup u0 err " << std::fabs(sup_u0 - 2.0 / 135.0);
  detail = os.str();
  return h123 && h4 && sup_ok && u0_ok;
}

// 6. B in (1, 1.2) with argmax within 1e-3 of t = 1; b1/B reproduced exactly
//    in integer arithmetic; R/r in [1.99, 2.01].
bool criterion6(std::string& detail) {
  example4::Constants c = example4::build_constants(2.0);
  // independent integer-arithmetic route
  unsigned long long p3 = 1;
  for (int k = 0; k < 16; ++k) p3 *= 3ull;
  const unsigned long long expected_num = 225ull * (65536ull + p3) * 13ull * 81ull;
  const bool ratio_exact = c.b1_over_B_num == expected_num && c.b1_over_B_den == 32ull &&
                           c.b1 == c.B * (double(expected_num) / 32.0);
  const double rr = c.R / c.r;
  std::ostringstream os;
  os << "B = " << c.B << " at t = " << c.argmax_B << "; b1/B num " << c.b1_over_B_num
     << (ratio_exact ? " (exact)" : " (MISMATCH)") << "; R/r = " << rr;
  detail = os.str();
  return c.B > 1.0 && c.B < 1.2 && std::fabs(c.argmax_B - 1.0) <= 1e-3 && ratio_exact &&
         rr >= 1.99 && rr <= 2.01;
}

// 7. 100 seeded trial fields with |u| = r: no violations of the norm bounds
//    or the pointwise envelopes; the 1e-6-shrunk control breaks.
bool criterion7(std::string& detail) {
  ProblemSpec spec = example4::build_problem(2.0, 2.0, 129, 129);
  OperatorContext ctx = make_context(spec, spec.make_grid());
  const double r = spec.constants.r;
  const double A = spec.constants.A;
  auto gs = bound_check_G(100, ctx, r, A, 42);
  auto fs = bound_check_F(100, ctx, r, A, 42);
  int violations = 0;
  for (const auto& rec : gs) violations += rec.pass ? 0 : 1;
  for (const auto& rec : fs) violations += rec.pass ? 0 : 1;
  auto control = bound_check_G(100, ctx, r, A / 1e6, 42);
  int control_violations = 0;
  for (const auto& rec : control) control_violations += rec.pass ? 0 : 1;
  std::ostringstream os;
  os << violations << " violations over " << gs.size() + fs.size() << " checks; negative control "
     << control_violations << "/100";
  detail = os.str();
  return violations == 0 && control_violations >= 1;
}

// 8. 100 seeded pairs give distortion ratios within [eps-4A-1e-9, eps+4A+1e-9].
bool criterion8(std::string& detail) {
  ProblemSpec spec = example4::build_problem(2.0, 2.0, 129, 129);
  OperatorContext ctx = make_context(spec, spec.make_grid());
  const double eps = spec.constants.epsilon;
  const double A = spec.constants.A;
  LipschitzProbe probe = lipschitz_probe(100, ctx, eps, spec.constants.R, 42);
  std::ostringstream os;
  os << "ratios in [" << probe.min_ratio << ", " << probe.max_ratio << "], band ["
     << eps - 4 * A - 1e-9 << ", " << eps + 4 * A + 1e-9 << "], pairs " << probe.pairs_used;
  detail = os.str();
  return probe.pairs_used == 100 && probe.min_ratio >= eps - 4 * A - 1e-9 &&
         probe.max_ratio <= eps + 4 * A + 1e-9;
}

// 9. paper-gap findings: (a) the long-window certify flags the growth
//    violation with its first crossing time; (b) the solution minimum from
//    finite differences and the images oracle agree to 1e-3, sign recorded.
bool criterion9(std::string& detail) {
  const fs::path dir =
      fs::temp_directory_path() / ("conewave_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  ProblemSpec spec = example4::build_problem(2.0, 2.0, 257, 257);
  const std::string spec_path = (dir / "spec41.json").string();
  atomic_write(spec_path, problem_spec_to_json(spec));
  int code = -1;
  {
    CoutSilencer quiet;
    code = cli_main({"certify", "--spec", spec_path, "--t-max", "50", "--out",
                     (dir / "out").string()});
  }
  std::ifstream is(dir / "out" / "certificate.json", std::ios::binary);
  std::ostringstream buf;
  buf << is.rdbuf();
  const std::string json = buf.str();
  double crossing = -1.0;
  const auto pos = json.find("\"first_crossing_t\":");
  if (pos != std::string::npos) crossing = std::atof(json.c_str() + pos + 19);
  const bool part_a = code == 2 && crossing > 0.0;

  SolveReport rep = solve_fd(spec, spec.make_grid());
  TheoremAudit audit = audit_theorem(rep, spec, true);
  const double oracle = audit.min_u_oracle.value_or(1e300);
  const bool part_b = std::fabs(rep.min_u - oracle) <= 1e-3 &&
                      ((rep.min_u < 0.0) == (oracle < 0.0));
  std::ostringstream os;
  os << "(a) exit " << code << ", first crossing t = " << crossing << "; (b) min_u fd "
     << rep.min_u << " vs images " << oracle << " (sign "
     << (rep.min_u < 0.0 ? "negative" : "non-negative") << ")";
  detail = os.str();
  fs::remove_all(dir);
  return part_a && part_b;
}

// 10. two reproduce-example runs with one seed emit byte-identical bundles.
bool criterion10(std::string& detail) {
  const fs::path dir =
      fs::temp_directory_path() / ("conewave_det_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto run = [&](const std::string& name) {
    const std::string out = (dir / name).string();
    CoutSilencer quiet;
    cli_main({"reproduce-example", "--nt", "65", "--nx", "65", "--trials", "10", "--seed", "42",
              "--out", out});
    std::ifstream is(out + "/example_report.json", std::ios::binary);
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
  };
  const std::string a = run("a");
  const std::string b = run("b");
  std::ostringstream os;
  os << "bundle size " << a.size() << " bytes, " << (a == b ? "identical" : "DIFFERENT");
  detail = os.str();
  fs::remove_all(dir);
  return !a.empty() && a == b;
}

const Criterion kCriteria[] = {
    {1, "operator oracle for the memory term (closed form -x^3 t^5/720)", criterion1},
    {2, "operator oracle for the load term (Fu(1,1) = 1/3600)", criterion2},
    {3, "finite-difference convergence order on the eigenmode", criterion3},
    {4, "integral-equation residual of the computed solution shrinks", criterion4},
    {5, "worked-example certificate at t_max = 2", criterion5},
    {6, "worked-example constants (B, b1/B exact ratio, R/r)", criterion6},
    {7, "norm-bound property suite with negative control", criterion7},
    {8, "two-sided distortion band for the residual mapping", criterion8},
    {9, "paper-gap findings (long-window violation; negative minimum)", criterion9},
    {10, "byte-deterministic bundles for a fixed seed", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  int only = -1;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only > 0 && c.id != only) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s\n        %s\n", ok ? "PASS" : "FAIL", c.id, c.title,
                detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  if (only < 0)
    std::printf("%d of %d criteria failed\n", failures, int(sizeof(kCriteria) / sizeof(Criterion)));
  return failures == 0 ? 0 : 1;
}
