#include "conewave/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "conewave/example4.hpp"
#include "conewave/report.hpp"
#include "conewave/solver.hpp"

namespace conewave {

namespace {

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitFail = 2;

Expr parse_named(const Json& j, const char* key, std::string* source) {
  if (!j.contains(key) || !j[key].is_string())
    throw std::runtime_error(std::string("spec file: missing expression field '") + key + "'");
  *source = j[key].get<std::string>();
  try {
    return parse(*source);
  } catch (const ParseError& e) {
    throw std::runtime_error(std::string("spec file: cannot parse '") + key + "': " + e.what());
  }
}

double number_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::runtime_error(std::string("spec file: missing numeric field '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

ProblemSpec problem_spec_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("spec file: invalid JSON: ") + e.what());
  }
  ProblemSpec spec;
  spec.L = number_field(j, "L");
  spec.f = parse_named(j, "f", &spec.f_source);
  spec.u0 = parse_named(j, "u0", &spec.u0_source);
  spec.u1 = parse_named(j, "u1", &spec.u1_source);
  spec.g = parse_named(j, "g", &spec.g_source);
  if (!j.contains("c") || !j["c"].is_array() || j["c"].empty())
    throw std::runtime_error("spec file: 'c' must be a non-empty array of growth terms");
  for (const auto& cj : j["c"]) {
    GrowthTerm term;
    term.c = parse_named(cj, "expr", &term.c_source);
    term.p = number_field(cj, "p");
    spec.growth.push_back(std::move(term));
  }
  if (!j.contains("constants"))
    throw std::runtime_error("spec file: missing 'constants' object");
  const Json& cs = j["constants"];
  spec.constants.epsilon = number_field(cs, "epsilon");
  spec.constants.A = number_field(cs, "A");
  spec.constants.R = number_field(cs, "R");
  spec.constants.r = number_field(cs, "r");
  spec.constants.b1 = number_field(cs, "b1");
  spec.constants.m = number_field(cs, "m");
  spec.t_max = number_field(j, "t_max");
  if (!j.contains("grid")) throw std::runtime_error("spec file: missing 'grid' object");
  spec.grid.nt = int(number_field(j["grid"], "nt"));
  spec.grid.nx = int(number_field(j["grid"], "nx"));
  spec.grid.t_max = spec.t_max;
  spec.grid.L = spec.L;
  spec.validate();
  return spec;
}

ProblemSpec load_problem_spec(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return problem_spec_from_json_text(buf.str());
}

std::string problem_spec_to_json(const ProblemSpec& spec) {
  Json j;
  j["L"] = spec.L;
  j["f"] = spec.f_source.empty() ? unparse(spec.f) : spec.f_source;
  Json carr = Json::array();
  for (const auto& term : spec.growth) {
    Json cj;
    cj["expr"] = term.c_source.empty() ? unparse(term.c) : term.c_source;
    cj["p"] = term.p;
    carr.push_back(cj);
  }
  j["c"] = carr;
  j["u0"] = spec.u0_source.empty() ? unparse(spec.u0) : spec.u0_source;
  j["u1"] = spec.u1_source.empty() ? unparse(spec.u1) : spec.u1_source;
  j["g"] = spec.g_source.empty() ? unparse(spec.g) : spec.g_source;
  Json cs;
  cs["epsilon"] = spec.constants.epsilon;
  cs["A"] = spec.constants.A;
  cs["R"] = spec.constants.R;
  cs["r"] = spec.constants.r;
  cs["b1"] = spec.constants.b1;
  cs["m"] = spec.constants.m;
  j["constants"] = cs;
  j["t_max"] = spec.t_max;
  j["grid"] = Json{{"nt", spec.grid.nt}, {"nx", spec.grid.nx}};
  return canonical_dump(j);
}

namespace {

struct Options {
  std::string spec_path;
  std::string out_dir = "out";
  std::string expr_text;
  double t_max = -1.0;
  int nt = -1;
  int nx = -1;
  double cfl = 0.9;
  std::uint64_t seed = 42;
  double p = 2.0;
  int trials = 100;
};

void apply_overrides(ProblemSpec& spec, const Options& opt) {
  if (opt.t_max > 0.0) {
    spec.t_max = opt.t_max;
    spec.grid.t_max = opt.t_max;
  }
  if (opt.nt > 0) spec.grid.nt = opt.nt;
  if (opt.nx > 0) spec.grid.nx = opt.nx;
  spec.validate();
}

std::string out_path(const Options& opt, const std::string& name) {
  return (std::filesystem::path(opt.out_dir) / name).string();
}

Json loc_json(const GridLoc& loc) {
  return Json{{"i", loc.i}, {"j", loc.j}, {"t", loc.t}, {"x", loc.x}};
}

Json norm_json(const EnormBreakdown& n) {
  return Json{{"sup_u", n.sup_u},   {"sup_ut", n.sup_ut}, {"sup_utt", n.sup_utt},
              {"sup_ux", n.sup_ux}, {"sup_uxx", n.sup_uxx}, {"total", n.total}};
}

Json solve_report_json(const SolveReport& rep) {
  Json j;
  j["pde_residual_sup"] = rep.pde_residual_sup;
  j["eq2_residual_sup"] = rep.eq2_residual_sup;
  j["min_u"] = rep.min_u;
  j["min_loc"] = loc_json(rep.min_loc);
  j["e_norm"] = norm_json(rep.norm);
  j["cfl"] = rep.cfl;
  j["substeps_per_output_row"] = rep.substeps;
  j["membership"] = Json{{"max_u_minus_u0", rep.max_u_minus_u0},
                         {"max_u_minus_m_u0", rep.max_u_minus_m_u0},
                         {"norm_margin_vs_r", rep.norm_margin_vs_r}};
  return j;
}

Json lemma1_json(const Lemma1Audit& a) {
  return Json{{"eq2_residual", a.eq2_residual},
              {"pde_residual", a.pde_residual},
              {"ic_error_u0", a.ic_error_u0},
              {"ic_error_u1", a.ic_error_u1},
              {"bc_error_dirichlet", a.bc_error_dirichlet},
              {"bc_error_neumann", a.bc_error_neumann}};
}

Json theorem_json(const TheoremAudit& a) {
  Json j;
  j["min_u"] = a.min_u;
  j["min_loc"] = loc_json(a.min_loc);
  if (a.min_u_oracle) j["min_u_images_oracle"] = *a.min_u_oracle;
  j["e_norm_total"] = a.norm_total;
  j["r"] = a.r;
  j["norm_margin_vs_r"] = a.norm_margin_vs_r;
  j["max_u_minus_u0"] = a.max_u_minus_u0;
  j["max_u_minus_m_u0"] = a.max_u_minus_m_u0;
  j["verdict"] = a.verdict;
  return j;
}

Json bound_results_json(const std::vector<BoundCheckResult>& rs) {
  Json arr = Json::array();
  for (const auto& r : rs) {
    Json j;
    j["name"] = r.name;
    j["measured"] = r.measured;
    j["bound"] = r.bound;
    j["slack"] = r.slack;
    j["witness"] = loc_json(r.witness);
    j["pass"] = r.pass;
    arr.push_back(j);
  }
  return arr;
}

Field residual_field(const Field& u, const ProblemSpec& spec) {
  Field utt = partial(u, Partial::TT);
  Field uxx = partial(u, Partial::XX);
  Field res(u.grid);
  for (int i = 1; i + 1 < u.grid.nt; ++i)
    for (int j = 1; j + 1 < u.grid.nx; ++j)
      res.values(i, j) = utt.values(i, j) - uxx.values(i, j) -
                         eval(spec.f, Env::txu(u.grid.t(i), u.grid.x(j), u.values(i, j)));
  return res;
}

int cmd_certify(const Options& opt) {
  ProblemSpec spec = load_problem_spec(opt.spec_path);
  apply_overrides(spec, opt);
  Certificate cert = certify(spec);
  atomic_write(out_path(opt, "certificate.json"), canonical_dump(certificate_to_json(cert)));
  atomic_write(out_path(opt, "certificate.txt"), certificate_to_text(cert));
  std::cout << certificate_to_text(cert);
  if (!cert.error.empty()) return kExitError;
  return cert.overall_pass ? kExitPass : kExitFail;
}

int cmd_solve(const Options& opt) {
  ProblemSpec spec = load_problem_spec(opt.spec_path);
  apply_overrides(spec, opt);
  SolveReport rep = solve_fd(spec, spec.make_grid(), opt.cfl);
  atomic_write(out_path(opt, "solution.csv"), to_csv(rep.u));
  atomic_write(out_path(opt, "pde_residual.csv"), to_csv(residual_field(rep.u, spec)));
  atomic_write(out_path(opt, "solve_report.json"), canonical_dump(solve_report_json(rep)));
  std::cout << "solved " << spec.grid.nt << "x" << spec.grid.nx
            << ": pde residual " << rep.pde_residual_sup << ", eq2 residual "
            << rep.eq2_residual_sup << ", min u " << rep.min_u << "\n";
  return kExitPass;
}

int cmd_audit(const Options& opt) {
  ProblemSpec spec = load_problem_spec(opt.spec_path);
  apply_overrides(spec, opt);
  SolveReport rep = solve_fd(spec, spec.make_grid(), opt.cfl);
  OperatorContext ctx = make_context(spec, spec.make_grid());
  Lemma1Audit lem = lemma1_audit(rep.u, ctx);
  TheoremAudit thm = audit_theorem(rep, spec, true);
  Json j;
  j["solve"] = solve_report_json(rep);
  j["lemma1"] = lemma1_json(lem);
  j["theorem"] = theorem_json(thm);
  atomic_write(out_path(opt, "audit.json"), canonical_dump(j));
  std::cout << "audit: eq2 residual " << lem.eq2_residual << ", min u " << thm.min_u;
  if (thm.min_u_oracle) std::cout << " (images oracle " << *thm.min_u_oracle << ")";
  std::cout << "\n" << thm.verdict << "\n";
  return kExitPass;
}

int cmd_bounds(const Options& opt) {
  ProblemSpec spec = load_problem_spec(opt.spec_path);
  apply_overrides(spec, opt);
  RectGrid grid = spec.make_grid();
  OperatorContext ctx = make_context(spec, grid);
  const double r = spec.constants.r;
  const double A = spec.constants.A;
  auto gs = bound_check_G(opt.trials, ctx, r, A, opt.seed);
  auto fs = bound_check_F(opt.trials, ctx, r, A, opt.seed);
  LipschitzProbe probe = lipschitz_probe(opt.trials, ctx, spec.constants.epsilon,
                                         spec.constants.R, opt.seed);
  int violations = 0;
  for (const auto& r2 : gs) violations += r2.pass ? 0 : 1;
  for (const auto& r2 : fs) violations += r2.pass ? 0 : 1;
  const double lo = spec.constants.epsilon - 4.0 * A - 1e-9;
  const double hi = spec.constants.epsilon + 4.0 * A + 1e-9;
  const bool lip_ok = probe.min_ratio >= lo && probe.max_ratio <= hi;
  Json j;
  j["seed"] = opt.seed;
  j["trials"] = opt.trials;
  j["violations"] = violations;
  j["G"] = bound_results_json(gs);
  j["F"] = bound_results_json(fs);
  j["lipschitz"] = Json{{"min_ratio", probe.min_ratio},
                        {"max_ratio", probe.max_ratio},
                        {"band_low", lo},
                        {"band_high", hi},
                        {"pairs_used", probe.pairs_used},
                        {"degenerate_skipped", probe.degenerate_skipped},
                        {"pass", lip_ok}};
  atomic_write(out_path(opt, "bounds.json"), canonical_dump(j));
  std::cout << "bound suites: " << violations << " violations over " << gs.size() + fs.size()
            << " checks; distortion ratios in [" << probe.min_ratio << ", " << probe.max_ratio
            << "]\n";
  return (violations == 0 && lip_ok) ? kExitPass : kExitFail;
}

std::string example_report_text(const example4::Report& rep) {
  std::ostringstream os;
  os.precision(12);
  const auto& c = rep.constants;
  os << "worked example report (p=" << c.p << ")\n\n";
  os << "special functions:\n";
  os << "  h(1) = " << rep.h_at_1 << "   (printed fourth-root variant would be "
     << rep.h_at_1_fourth_root_variant << "; suspected typo)\n";
  os << "  t^4 h(t) at t=100: " << rep.sup_check_t4h << " -> limit 2 sqrt2 = "
     << 2.0 * std::sqrt(2.0) << "\n";
  os << "  t^4 l(t) at t=100: " << rep.sup_check_t4l << " -> limit -sqrt2 = "
     << -std::sqrt(2.0) << "\n\n";
  os << "constants:\n";
  os << "  B  = " << c.B << " at t = " << c.argmax_B << "\n";
  os << "  b1 = " << c.b1 << "  (b1/B = " << c.b1_over_B_num << "/" << c.b1_over_B_den << ")\n";
  os << "  A  = " << c.A << "\n";
  os << "  R  = " << c.R << "  (R/r = " << c.R / c.r << ")\n\n";
  os << "growth inequality (i): measured sup = " << rep.h4i.measured_sup << " = A/"
     << 1.0 / rep.h4i.measured_over_A << "\n";
  os << "  closed-form chain bound A/100 = " << rep.h4i.paper_chain_bound
     << (rep.h4i.within_paper_chain ? " (measured sup within it)"
                                    : " (measured sup EXCEEDS it; the closed form only bounds"
                                      " the integral before the branch point t=1)")
     << "\n";
  os << "  extended window: first violation of (i) at t = " << rep.h4i.first_crossing_extended
     << "\n\n";
  os << "localized lower bound (iii): measured = " << rep.h4iii.measured_lhs
     << " >= A/b1 = " << rep.h4iii.a_over_b1 << " : " << (rep.h4iii.chain_holds ? "yes" : "NO")
     << "\n";
  os << "  displayed intermediate product = " << rep.h4iii.paper_intermediate
     << " (rel diff vs A/b1 = " << rep.h4iii.intermediate_rel_diff << ")\n\n";
  os << "g mass, two quadrature paths: rel diff = " << rep.g_mass_two_paths_rel_diff << "\n\n";
  os << "certificate: " << (rep.certificate.overall_pass ? "PASS" : "FAIL") << "\n\n";
  os << "solve: min u = " << rep.solve.min_u << " at (t=" << rep.solve.min_loc.t
     << ", x=" << rep.solve.min_loc.x << ")";
  if (rep.theorem.min_u_oracle) os << ", images oracle min = " << *rep.theorem.min_u_oracle;
  os << "\n  |u| = " << rep.solve.norm.total << " vs r = " << c.r << "\n";
  os << "  note: " << rep.theorem.verdict << "\n";
  os << "  eq2 residual = " << rep.lemma1.eq2_residual
     << ", pde residual = " << rep.lemma1.pde_residual << "\n\n";
  os << "bound suites: " << rep.bound_violations << " violations over " << rep.bound_checks
     << " checks\n";
  os << "distortion ratios in [" << rep.lipschitz.min_ratio << ", " << rep.lipschitz.max_ratio
     << "] (band [" << c.epsilon - 4.0 * c.A << ", " << c.epsilon + 4.0 * c.A << "])\n";
  return os.str();
}

Json example_report_json(const example4::Report& rep) {
  const auto& c = rep.constants;
  Json j;
  j["options"] = Json{{"p", rep.options.p},
                      {"t_max", rep.options.t_max},
                      {"nt", rep.options.nt},
                      {"nx", rep.options.nx},
                      {"extended_t_max", rep.options.extended_t_max},
                      {"bound_trials", rep.options.bound_trials},
                      {"lipschitz_pairs", rep.options.lipschitz_pairs},
                      {"seed", rep.options.seed}};
  j["constants"] = Json{{"p", c.p},
                        {"B", c.B},
                        {"argmax_B", c.argmax_B},
                        {"epsilon", c.epsilon},
                        {"m", c.m},
                        {"r", c.r},
                        {"b1", c.b1},
                        {"A", c.A},
                        {"R", c.R},
                        {"b1_over_B_num", c.b1_over_B_num},
                        {"b1_over_B_den", c.b1_over_B_den}};
  j["special_functions"] = Json{
      {"h_at_1", rep.h_at_1},
      {"h_at_1_fourth_root_variant", rep.h_at_1_fourth_root_variant},
      {"t4_h_at_100", rep.sup_check_t4h},
      {"t4_l_at_100", rep.sup_check_t4l}};
  j["h4_i_chain"] = Json{{"measured_sup", rep.h4i.measured_sup},
                         {"measured_over_A", rep.h4i.measured_over_A},
                         {"paper_chain_bound_A_over_100", rep.h4i.paper_chain_bound},
                         {"within_paper_chain", rep.h4i.within_paper_chain},
                         {"first_crossing_extended", rep.h4i.first_crossing_extended}};
  j["h4_iii_chain"] = Json{{"measured_lhs", rep.h4iii.measured_lhs},
                           {"paper_intermediate", rep.h4iii.paper_intermediate},
                           {"a_over_b1", rep.h4iii.a_over_b1},
                           {"intermediate_rel_diff", rep.h4iii.intermediate_rel_diff},
                           {"chain_holds", rep.h4iii.chain_holds}};
  j["g_mass_two_paths_rel_diff"] = rep.g_mass_two_paths_rel_diff;
  j["certificate"] = certificate_to_json(rep.certificate);
  j["solve"] = solve_report_json(rep.solve);
  j["theorem_audit"] = theorem_json(rep.theorem);
  j["lemma1_audit"] = lemma1_json(rep.lemma1);
  j["bound_suites"] = Json{{"violations", rep.bound_violations},
                           {"checks", rep.bound_checks}};
  j["lipschitz"] = Json{{"min_ratio", rep.lipschitz.min_ratio},
                        {"max_ratio", rep.lipschitz.max_ratio},
                        {"pairs_used", rep.lipschitz.pairs_used}};
  return j;
}

int cmd_reproduce_example(const Options& opt) {
  example4::ReproduceOptions ropt;
  ropt.p = opt.p;
  if (opt.t_max > 0.0) ropt.t_max = opt.t_max;
  if (opt.nt > 0) ropt.nt = opt.nt;
  if (opt.nx > 0) ropt.nx = opt.nx;
  ropt.bound_trials = opt.trials;
  ropt.lipschitz_pairs = opt.trials;
  ropt.seed = opt.seed;
  example4::Report rep = example4::reproduce(ropt);
  ProblemSpec spec = example4::build_problem(ropt.p, ropt.t_max, ropt.nt, ropt.nx);
  atomic_write(out_path(opt, "example_report.json"), canonical_dump(example_report_json(rep)));
  atomic_write(out_path(opt, "example_report.txt"), example_report_text(rep));
  atomic_write(out_path(opt, "problem_spec.json"), problem_spec_to_json(spec));
  std::cout << example_report_text(rep);
  const bool ok = rep.certificate.overall_pass && rep.bound_violations == 0 &&
                  rep.h4iii.chain_holds;
  return ok ? kExitPass : kExitFail;
}

int cmd_parse_check(const Options& opt) {
  if (!opt.expr_text.empty()) {
    Expr e = parse(opt.expr_text);  // ParseError escapes to the top-level handler
    std::cout << unparse(e) << "\n";
    return kExitPass;
  }
  if (opt.spec_path.empty())
    throw std::runtime_error("parse-check: provide an expression or --spec FILE");
  ProblemSpec spec = load_problem_spec(opt.spec_path);
  std::cout << "f  = " << unparse(spec.f) << "\n";
  for (std::size_t k = 0; k < spec.growth.size(); ++k)
    std::cout << "c" << k + 1 << " = " << unparse(spec.growth[k].c)
              << "  (p = " << spec.growth[k].p << ")\n";
  std::cout << "u0 = " << unparse(spec.u0) << "\n";
  std::cout << "u1 = " << unparse(spec.u1) << "\n";
  std::cout << "g  = " << unparse(spec.g) << "\n";
  return kExitPass;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"conewave: numerical certificates for a mixed hyperbolic IBVP"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd, bool needs_spec) {
    auto* spec_opt = cmd->add_option("--spec", opt.spec_path, "problem spec JSON file");
    if (needs_spec) spec_opt->required();
    cmd->add_option("--t-max", opt.t_max, "override the time horizon");
    cmd->add_option("--nt", opt.nt, "override grid nodes in t");
    cmd->add_option("--nx", opt.nx, "override grid nodes in x");
    cmd->add_option("--cfl", opt.cfl, "CFL number for the solver")->check(CLI::Range(1e-9, 1.0));
    cmd->add_option("--seed", opt.seed, "seed for randomized suites");
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--trials", opt.trials, "trial count for bound suites");
  };

  auto* certify_cmd = app.add_subcommand("certify", "check the hypothesis inequalities");
  add_common(certify_cmd, true);
  auto* solve_cmd = app.add_subcommand("solve", "finite-difference solve with reports");
  add_common(solve_cmd, true);
  auto* audit_cmd = app.add_subcommand("audit", "solve plus equivalence and membership audits");
  add_common(audit_cmd, true);
  auto* bounds_cmd = app.add_subcommand("bounds", "randomized operator bound suites");
  add_common(bounds_cmd, true);
  auto* repro_cmd =
      app.add_subcommand("reproduce-example", "run the built-in worked example end to end");
  add_common(repro_cmd, false);
  repro_cmd->add_option("--p", opt.p, "nonlinearity exponent (> 1)")->check(CLI::Range(1.0 + 1e-9, 100.0));
  auto* parse_cmd = app.add_subcommand("parse-check", "parse an expression or a spec file");
  parse_cmd->add_option("expr", opt.expr_text, "expression text");
  parse_cmd->add_option("--spec", opt.spec_path, "problem spec JSON file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitError;
  }

  try {
    if (certify_cmd->parsed()) return cmd_certify(opt);
    if (solve_cmd->parsed()) return cmd_solve(opt);
    if (audit_cmd->parsed()) return cmd_audit(opt);
    if (bounds_cmd->parsed()) return cmd_bounds(opt);
    if (repro_cmd->parsed()) return cmd_reproduce_example(opt);
    if (parse_cmd->parsed()) return cmd_parse_check(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace conewave
