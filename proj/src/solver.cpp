#include "conewave/solver.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "conewave/quad.hpp"

namespace conewave {

namespace {

double eval_f(const ProblemSpec& spec, double t, double x, double u) {
  return eval(spec.f, Env::txu(t, x, u));
}

}  // namespace

SolveReport solve_fd(const ProblemSpec& spec, const RectGrid& grid, double cfl) {
  grid.validate();
  if (!(cfl > 0.0 && cfl <= 1.0)) throw SolveError("solve_fd: cfl must lie in (0, 1]");
  if (std::fabs(grid.L - spec.L) > 1e-12 * spec.L)
    throw SolveError("solve_fd: grid length does not match spec.L");

  const int nx = grid.nx;
  const double dx = grid.dx();
  const double dt_out = grid.dt();
  const int substeps = std::max(1, int(std::ceil(dt_out / (cfl * dx) - 1e-12)));
  const double dt = dt_out / substeps;
  const double lam = dt / dx;
  const double lam2 = lam * lam;

  Eigen::VectorXd x_nodes(nx);
  for (int j = 0; j < nx; ++j) x_nodes[j] = grid.x(j);

  Eigen::VectorXd u_prev(nx), u_cur(nx), u_next(nx);
  for (int j = 0; j < nx; ++j) u_prev[j] = eval(spec.u0, Env::only_x(x_nodes[j]));

  // Taylor start: u1 = u0 + dt u1' + dt^2/2 (u0'' + f(0, x, u0))
  Eigen::VectorXd u0xx(nx);
  for (int j = 1; j + 1 < nx; ++j)
    u0xx[j] = (u_prev[j + 1] - 2.0 * u_prev[j] + u_prev[j - 1]) / (dx * dx);
  u0xx[0] = (2.0 * u_prev[0] - 5.0 * u_prev[1] + 4.0 * u_prev[2] - u_prev[3]) / (dx * dx);
  u0xx[nx - 1] = 2.0 * (u_prev[nx - 2] - u_prev[nx - 1]) / (dx * dx);  // ghost closure
  for (int j = 0; j < nx; ++j) {
    const double u1v = eval(spec.u1, Env::only_x(x_nodes[j]));
    u_cur[j] = u_prev[j] + dt * u1v +
               0.5 * dt * dt * (u0xx[j] + eval_f(spec, 0.0, x_nodes[j], u_prev[j]));
  }
  u_cur[0] = 0.0;

  SolveReport report;
  report.u = Field(grid);
  report.u.values.row(0) = u_prev.transpose().array();
  report.cfl = lam;
  report.substeps = substeps;

  const long total_steps = long(grid.nt - 1) * substeps;
  for (long n = 1; n <= total_steps; ++n) {
    const double tn = n * dt;
    if (n % substeps == 0) {
      const int row = int(n / substeps);
      if (row < grid.nt) report.u.values.row(row) = u_cur.transpose().array();
    }
    if (n == total_steps) break;
    // advance u_cur (state at t_n) to t_{n+1}
    const double t_here = tn;
    for (int j = 1; j + 1 < nx; ++j) {
      const double f = eval_f(spec, t_here, x_nodes[j], u_cur[j]);
      u_next[j] = 2.0 * u_cur[j] - u_prev[j] +
                  lam2 * (u_cur[j + 1] - 2.0 * u_cur[j] + u_cur[j - 1]) + dt * dt * f;
    }
    u_next[0] = 0.0;
    {
      const double f = eval_f(spec, t_here, x_nodes[nx - 1], u_cur[nx - 1]);
      u_next[nx - 1] = 2.0 * u_cur[nx - 1] - u_prev[nx - 1] +
                       lam2 * 2.0 * (u_cur[nx - 2] - u_cur[nx - 1]) + dt * dt * f;
    }
    u_prev.swap(u_cur);
    u_cur.swap(u_next);
    if (!u_cur.allFinite() || u_cur.cwiseAbs().maxCoeff() > 1e100) {
      std::ostringstream os;
      os << "solve_fd: state blew up at step " << n + 1 << " (t=" << (n + 1) * dt << ")";
      throw SolveError(os.str());
    }
  }

  report.norm = e_norm(report.u);
  report.pde_residual_sup = pde_residual(report.u, spec);
  {
    OperatorContext ctx = make_context(spec, grid);
    report.eq2_residual_sup = residual_phi(report.u, ctx).sup;
  }

  // minimum and membership margins
  double mn = std::numeric_limits<double>::infinity();
  GridLoc mn_loc;
  double max_du0 = -std::numeric_limits<double>::infinity();
  double max_dmu0 = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd u0v(nx);
  for (int j = 0; j < nx; ++j) u0v[j] = eval(spec.u0, Env::only_x(x_nodes[j]));
  for (int i = 0; i < grid.nt; ++i) {
    const double t = grid.t(i);
    for (int j = 0; j < nx; ++j) {
      const double v = report.u.values(i, j);
      if (v < mn) {
        mn = v;
        mn_loc = {i, j, t, x_nodes[j]};
      }
      if (i > 0) max_du0 = std::max(max_du0, v - u0v[j]);
      if (t >= 1.0 && t <= 2.0)
        max_dmu0 = std::max(max_dmu0, v - spec.constants.m * u0v[j]);
    }
  }
  report.min_u = mn;
  report.min_loc = mn_loc;
  report.max_u_minus_u0 = max_du0;
  report.max_u_minus_m_u0 = max_dmu0;
  report.norm_margin_vs_r = spec.constants.r - report.norm.total;
  return report;
}

// ---------------------------------------------------------------------------
// Method of images

namespace {

struct Reflection {
  double x = 0.0;   // pulled back into [0, L]
  double sign = 1.0;
};

// odd about 0, even about L, period 4L
Reflection reflect(double y, double L) {
  double z = std::fmod(y, 4.0 * L);
  if (z < 0.0) z += 4.0 * L;
  if (z <= L) return {z, 1.0};
  if (z <= 2.0 * L) return {2.0 * L - z, 1.0};
  if (z <= 3.0 * L) return {z - 2.0 * L, -1.0};
  return {4.0 * L - z, -1.0};
}

double extended_eval(const Expr& e, double y, double L) {
  const Reflection r = reflect(y, L);
  return r.sign * eval(e, Env::only_x(r.x));
}

// integral of the extended data over [a, b], split at the reflection
// breakpoints (multiples of L) so every Gauss panel sees a smooth piece
double integrate_extended(const std::function<double(double)>& fn, double a, double b, double L) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  Eigen::VectorXd gx, gw;
  gauss_legendre(8, gx, gw);
  double total = 0.0;
  double lo = a;
  long k = long(std::floor(a / L)) + 1;
  while (lo < b) {
    double hi = std::min(b, double(k) * L);
    if (hi > lo) {
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double s = 0.0;
      for (int q = 0; q < 8; ++q) s += gw[q] * fn(mid + half * gx[q]);
      total += half * s;
    }
    lo = hi;
    ++k;
  }
  return sign * total;
}

}  // namespace

Field frozen_source(const ProblemSpec& spec, const Field& u) {
  Field f(u.grid);
  for (int i = 0; i < u.grid.nt; ++i)
    for (int j = 0; j < u.grid.nx; ++j)
      f.values(i, j) = eval_f(spec, u.grid.t(i), u.grid.x(j), u.values(i, j));
  return f;
}

double images_oracle(const ProblemSpec& spec, const Field* f_frozen, double t, double x) {
  const double L = spec.L;
  if (t < 0.0 || x < -1e-12 || x > L * (1.0 + 1e-12))
    throw std::domain_error("images_oracle: point outside the domain");
  const double lin0 = 0.5 * (extended_eval(spec.u0, x + t, L) + extended_eval(spec.u0, x - t, L));
  const double lin1 =
      0.5 * integrate_extended([&](double y) { return extended_eval(spec.u1, y, L); }, x - t,
                               x + t, L);
  double duhamel = 0.0;
  if (f_frozen != nullptr && t > 0.0) {
    // 1/2 int_0^t int_{x-(t-s)}^{x+(t-s)} f~(s, y) dy ds with f~ the odd/even
    // extension of the frozen source, read via bilinear interpolation
    Eigen::VectorXd gx, gw;
    gauss_legendre(8, gx, gw);
    const int panels = std::max(8, int(std::ceil(16.0 * t)));
    auto f_ext = [&](double s, double y) {
      const Reflection r = reflect(y, L);
      return r.sign * interp(*f_frozen, s, r.x);
    };
    for (int p = 0; p < panels; ++p) {
      const double lo = t * p / panels, hi = t * (p + 1) / panels;
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (int q = 0; q < 8; ++q) {
        const double s = mid + half * gx[q];
        duhamel += half * gw[q] *
                   integrate_extended([&](double y) { return f_ext(s, y); }, x - (t - s),
                                      x + (t - s), L);
      }
    }
    duhamel *= 0.5;
  }
  return lin0 + lin1 + duhamel;
}

double pde_residual(const Field& u, const ProblemSpec& spec) {
  const RectGrid& g = u.grid;
  Field utt = partial(u, Partial::TT);
  Field uxx = partial(u, Partial::XX);
  double sup = 0.0;
  for (int i = 1; i + 1 < g.nt; ++i)
    for (int j = 1; j + 1 < g.nx; ++j) {
      const double res =
          utt.values(i, j) - uxx.values(i, j) - eval_f(spec, g.t(i), g.x(j), u.values(i, j));
      sup = std::max(sup, std::fabs(res));
    }
  return sup;
}

Lemma1Audit lemma1_audit(const Field& u, const OperatorContext& ctx) {
  Lemma1Audit audit;
  audit.eq2_residual = residual_phi(u, ctx).sup;
  audit.pde_residual = pde_residual(u, ctx.problem);
  const RectGrid& g = ctx.grid;
  Field ut = partial(u, Partial::T);
  Field ux = partial(u, Partial::X);
  for (int j = 0; j < g.nx; ++j) {
    audit.ic_error_u0 = std::max(audit.ic_error_u0, std::fabs(u.values(0, j) - ctx.u0_vec[j]));
    audit.ic_error_u1 = std::max(audit.ic_error_u1, std::fabs(ut.values(0, j) - ctx.u1_vec[j]));
  }
  for (int i = 0; i < g.nt; ++i) {
    audit.bc_error_dirichlet = std::max(audit.bc_error_dirichlet, std::fabs(u.values(i, 0)));
    audit.bc_error_neumann = std::max(audit.bc_error_neumann, std::fabs(ux.values(i, g.nx - 1)));
  }
  return audit;
}

IterationHistory fixed_point_iterate(const Field& u_init, const OperatorContext& ctx,
                                     double omega, double tol, int max_iter) {
  if (!(omega > 0.0 && omega <= 1.0))
    throw std::invalid_argument("fixed_point_iterate: omega must lie in (0, 1]");
  if (!u_init.all_finite()) throw std::invalid_argument("fixed_point_iterate: non-finite start");
  IterationHistory hist;
  Field u = u_init;
  double initial = -1.0;
  for (int it = 0; it <= max_iter; ++it) {
    PhiResidual phi = residual_phi(u, ctx);
    hist.steps.push_back({it, phi.sup, e_norm(u).total});
    if (initial < 0.0) initial = phi.sup;
    if (phi.sup <= tol) {
      hist.termination = IterationHistory::Termination::Tolerance;
      return hist;
    }
    if (initial > 0.0 && phi.sup > 1e3 * initial) {
      hist.termination = IterationHistory::Termination::Divergence;
      return hist;
    }
    if (it == max_iter) break;
    u.values += omega * phi.field.values;
    if (!u.all_finite()) {
      hist.termination = IterationHistory::Termination::Divergence;
      return hist;
    }
  }
  hist.termination = IterationHistory::Termination::MaxIterations;
  return hist;
}

TheoremAudit audit_theorem(const SolveReport& report, const ProblemSpec& spec, bool with_oracle) {
  TheoremAudit audit;
  audit.min_u = report.min_u;
  audit.min_loc = report.min_loc;
  audit.norm_total = report.norm.total;
  audit.r = spec.constants.r;
  audit.norm_margin_vs_r = spec.constants.r - report.norm.total;
  audit.max_u_minus_u0 = report.max_u_minus_u0;
  audit.max_u_minus_m_u0 = report.max_u_minus_m_u0;
  if (with_oracle) {
    Field f_frozen = frozen_source(spec, report.u);
    const RectGrid& g = report.u.grid;
    // coarse sweep (boundary rows included) plus the finite-difference argmin
    auto strided = [](int n, int parts) {
      std::vector<int> idx;
      const int stride = std::max(1, (n - 1) / parts);
      for (int k = 0; k < n - 1; k += stride) idx.push_back(k);
      idx.push_back(n - 1);
      return idx;
    };
    double best = std::numeric_limits<double>::infinity();
    for (int i : strided(g.nt, 32))
      for (int j : strided(g.nx, 32))
        best = std::min(best, images_oracle(spec, &f_frozen, g.t(i), g.x(j)));
    best = std::min(best,
                    images_oracle(spec, &f_frozen, report.min_loc.t, report.min_loc.x));
    audit.min_u_oracle = best;
  }
  std::ostringstream os;
  os << (report.min_u >= -1e-10 ? "nonnegative within rounding"
                                : "solution dips negative; minimum reported");
  os << "; norm " << (report.norm.total < spec.constants.r ? "below" : "exceeds") << " r";
  audit.verdict = os.str();
  return audit;
}

}  // namespace conewave
