#include "conewave/operators.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "conewave/parallel.hpp"
#include "conewave/quad.hpp"

namespace conewave {

namespace {

void require_same_grid(const Field& u, const OperatorContext& ctx) {
  if (!(u.grid == ctx.grid)) throw std::invalid_argument("operator: field grid does not match context grid");
}

Eigen::VectorXd sample_1d(const Expr& e, int n, double h) {
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v[j] = eval(e, Env::only_x(j * h));
  return v;
}

void check_nonnegative(const Field& f, const char* what) {
  double lo = f.values.minCoeff();
  if (lo < 0.0) {
    std::ostringstream os;
    os << "operator context: " << what << " must be non-negative, found " << lo;
    throw std::invalid_argument(os.str());
  }
}

// f(t_i, x_j, u_ij) on the whole grid.
Eigen::ArrayXXd sample_f(const Field& u, const OperatorContext& ctx) {
  const RectGrid& g = ctx.grid;
  Eigen::ArrayXXd out(g.nt, g.nx);
  for (int i = 0; i < g.nt; ++i) {
    const double t = g.t(i);
    for (int j = 0; j < g.nx; ++j) {
      try {
        out(i, j) = eval(ctx.problem.f, Env::txu(t, g.x(j), u.values(i, j)));
      } catch (const EvalError& err) {
        std::ostringstream os;
        os << err.what() << " while evaluating f at t=" << t << ", x=" << g.x(j);
        throw EvalError(os.str());
      }
    }
  }
  return out;
}

// Outer kernel pass shared by G and F: from v(t1, x1) compute
//   out(t, x) = int_0^t (t-t1)^2 int_0^x (x-x1)^2 v(t1, x1) dx1 dt1.
Eigen::ArrayXXd kernel_double_integral(const Eigen::ArrayXXd& v, const RectGrid& g) {
  Eigen::ArrayXXd q(g.nt, g.nx);
  parallel_for(g.nt, [&](int i) {
    Eigen::VectorXd row = v.row(i).matrix().transpose();
    q.row(i) = x_kernel_at_nodes(row, g.dx()).transpose().array();
  });
  Eigen::ArrayXXd out(g.nt, g.nx);
  parallel_for(g.nx, [&](int j) {
    out.col(j) = volterra_moment(q.col(j).matrix(), 2, g.dt()).array();
  });
  return out;
}

}  // namespace

OperatorContext make_context(const ProblemSpec& spec, const RectGrid& grid) {
  grid.validate();
  if (std::fabs(grid.L - spec.L) > 1e-12 * spec.L)
    throw std::invalid_argument("make_context: grid length does not match spec.L");
  OperatorContext ctx;
  ctx.problem = spec;
  ctx.grid = grid;
  ctx.g_field = sample(spec.g, grid);
  check_nonnegative(ctx.g_field, "g");
  ctx.u0_vec = sample_1d(spec.u0, grid.nx, grid.dx());
  ctx.u1_vec = sample_1d(spec.u1, grid.nx, grid.dx());
  for (const auto& term : spec.growth) {
    Field c = sample(term.c, grid);
    check_nonnegative(c, "c_j");
    // cumulative mass int_0^t int_0^L c_j: x integral per row, then prefix in t
    Eigen::VectorXd row_mass(grid.nt);
    for (int i = 0; i < grid.nt; ++i) {
      Eigen::VectorXd row = c.values.row(i).matrix().transpose();
      row_mass[i] = prefix_integral(row, grid.dx())[grid.nx - 1];
    }
    ctx.cj_mass.push_back(prefix_integral(row_mass, grid.dt()));
    ctx.c_fields.push_back(std::move(c));
  }
  return ctx;
}

Field apply_G(const Field& u, const OperatorContext& ctx) {
  require_same_grid(u, ctx);
  const RectGrid& g = ctx.grid;
  // W(t1, x1) = int_0^{t1} (t1 - t2) u(t2, x1) dt2, one Volterra pass per column
  Eigen::ArrayXXd w(g.nt, g.nx);
  parallel_for(g.nx, [&](int j) {
    w.col(j) = volterra_moment(u.values.col(j).matrix(), 1, g.dt()).array();
  });
  Eigen::ArrayXXd integrand = ctx.g_field.values * w;
  return Field(g, -0.25 * kernel_double_integral(integrand, g));
}

namespace {

// psi(t, x1) = -u + u0 + t u1 + int_0^t (t - t1) f(t1, x1, u) dt1
Eigen::ArrayXXd inner_load(const Field& u, const OperatorContext& ctx) {
  const RectGrid& g = ctx.grid;
  Eigen::ArrayXXd fvals = sample_f(u, ctx);
  Eigen::ArrayXXd psi(g.nt, g.nx);
  parallel_for(g.nx, [&](int j) {
    Eigen::VectorXd duhamel = volterra_moment(fvals.col(j).matrix(), 1, g.dt());
    for (int i = 0; i < g.nt; ++i)
      psi(i, j) = -u.values(i, j) + ctx.u0_vec[j] + g.t(i) * ctx.u1_vec[j] + duhamel[i];
  });
  return psi;
}

void f1_f2_rows(const Eigen::ArrayXXd& psi, const RectGrid& g, Eigen::ArrayXXd* f1,
                Eigen::ArrayXXd* f2) {
  parallel_for(g.nt, [&](int i) {
    Eigen::VectorXd row = psi.row(i).matrix().transpose();
    Eigen::VectorXd weighted(g.nx);
    for (int j = 0; j < g.nx; ++j) weighted[j] = g.x(j) * row[j];
    if (f1) f1->row(i) = prefix_integral(weighted, g.dx()).transpose().array();
    if (f2) {
      Eigen::VectorXd pre = prefix_integral(row, g.dx());
      const double total = pre[g.nx - 1];
      for (int j = 0; j < g.nx; ++j) (*f2)(i, j) = total - pre[j];
    }
  });
}

}  // namespace

Field apply_F1(const Field& u, const OperatorContext& ctx) {
  require_same_grid(u, ctx);
  Eigen::ArrayXXd psi = inner_load(u, ctx);
  Eigen::ArrayXXd f1(ctx.grid.nt, ctx.grid.nx);
  f1_f2_rows(psi, ctx.grid, &f1, nullptr);
  return Field(ctx.grid, std::move(f1));
}

Field apply_F2(const Field& u, const OperatorContext& ctx) {
  require_same_grid(u, ctx);
  Eigen::ArrayXXd psi = inner_load(u, ctx);
  Eigen::ArrayXXd f2(ctx.grid.nt, ctx.grid.nx);
  f1_f2_rows(psi, ctx.grid, nullptr, &f2);
  return Field(ctx.grid, std::move(f2));
}

namespace {

Eigen::ArrayXXd f3_values(const Field& u, const OperatorContext& ctx) {
  const RectGrid& g = ctx.grid;
  Eigen::ArrayXXd psi = inner_load(u, ctx);
  Eigen::ArrayXXd f1(g.nt, g.nx), f2(g.nt, g.nx);
  f1_f2_rows(psi, g, &f1, &f2);
  for (int j = 0; j < g.nx; ++j) f2.col(j) *= g.x(j);
  return f1 + f2;
}

}  // namespace

Field apply_F3(const Field& u, const OperatorContext& ctx) {
  require_same_grid(u, ctx);
  return Field(ctx.grid, f3_values(u, ctx));
}

Field apply_F(const Field& u, const OperatorContext& ctx) {
  require_same_grid(u, ctx);
  Eigen::ArrayXXd integrand = ctx.g_field.values * f3_values(u, ctx);
  return Field(ctx.grid, 0.25 * kernel_double_integral(integrand, ctx.grid));
}

Field apply_T_raw(const Field& u, const OperatorContext& ctx, double eps) {
  Field gu = apply_G(u, ctx);
  return Field(ctx.grid, (1.0 - eps) * u.values + gu.values);
}

Field apply_S_raw(const Field& u, const OperatorContext& ctx, double eps) {
  Field fu = apply_F(u, ctx);
  return Field(ctx.grid, eps * u.values + fu.values);
}

namespace {
void require_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
}
}  // namespace

Field apply_T(const Field& u, const OperatorContext& ctx, double eps) {
  require_eps(eps);
  return apply_T_raw(u, ctx, eps);
}

Field apply_S(const Field& u, const OperatorContext& ctx, double eps) {
  require_eps(eps);
  return apply_S_raw(u, ctx, eps);
}

PhiResidual residual_phi(const Field& u, const OperatorContext& ctx) {
  Field gu = apply_G(u, ctx);
  Field fu = apply_F(u, ctx);
  PhiResidual res;
  res.field = Field(ctx.grid, gu.values + fu.values);
  res.sup = sup_abs(res.field, &res.where);
  return res;
}

// ---------------------------------------------------------------------------
// Trial fields and bound suites

namespace {

// uniform double in [lo, hi) from the top 53 bits, identical on every platform
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u01 = double(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u01;
}

}  // namespace

Field random_smooth_field(const RectGrid& grid, std::uint64_t seed, double target_norm) {
  std::mt19937_64 rng(seed);
  double poly[6];
  for (double& c : poly) c = uniform(rng, -1.0, 1.0);
  constexpr int kModes = 3;
  double amp[kModes], wt[kModes], wx[kModes], pt[kModes], px[kModes];
  for (int k = 0; k < kModes; ++k) {
    amp[k] = uniform(rng, -1.0, 1.0);
    wt[k] = M_PI * uniform(rng, 0.5, 3.0);
    wx[k] = M_PI * uniform(rng, 0.5, 3.0);
    pt[k] = uniform(rng, 0.0, 2.0 * M_PI);
    px[k] = uniform(rng, 0.0, 2.0 * M_PI);
  }
  Field f(grid);
  for (int i = 0; i < grid.nt; ++i) {
    const double t = grid.t(i) / grid.t_max;
    for (int j = 0; j < grid.nx; ++j) {
      const double x = grid.x(j) / grid.L;
      double v = poly[0] + poly[1] * t + poly[2] * x + poly[3] * t * x + poly[4] * t * t +
                 poly[5] * x * x;
      for (int k = 0; k < kModes; ++k)
        v += amp[k] * std::sin(wt[k] * t + pt[k]) * std::sin(wx[k] * x + px[k]);
      f.values(i, j) = v;
    }
  }
  const double total = e_norm(f).total;
  if (total > 0.0) f.values *= target_norm / total;
  return f;
}

namespace {

std::uint64_t trial_seed(std::uint64_t seed, int index, std::uint64_t salt) {
  return seed * 0x9e3779b97f4a7c15ull + salt * 0x100000001b3ull + std::uint64_t(index);
}

BoundCheckResult norm_bound_result(const std::string& name, const Field& image, double bound) {
  BoundCheckResult r;
  r.name = name;
  EnormBreakdown nb = e_norm(image);
  r.measured = nb.total;
  r.bound = bound;
  r.slack = bound - nb.total;
  sup_abs(image, &r.witness);
  r.witness_component = "sup_u";
  r.pass = nb.total <= bound + 1e-12 * std::max(bound, nb.total);
  return r;
}

// worst node of |field| - envelope(t); returns the margin and fills witness
BoundCheckResult pointwise_bound_result(const std::string& name, const Field& field,
                                        const OperatorContext& ctx, double coef_r,
                                        double coef_c) {
  const RectGrid& g = ctx.grid;
  BoundCheckResult out;
  out.name = name;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_measured = 0.0, worst_bound = 0.0;
  GridLoc worst_loc;
  const double rr = ctx.problem.constants.r;
  for (int i = 0; i < g.nt; ++i) {
    const double t = g.t(i);
    double growth = 0.0;
    for (std::size_t jj = 0; jj < ctx.cj_mass.size(); ++jj)
      growth += std::pow(rr, ctx.problem.growth[jj].p) * ctx.cj_mass[jj][i];
    const double envelope = coef_r * rr * (1.0 + t) + coef_c * t * growth;
    for (int j = 0; j < g.nx; ++j) {
      const double v = std::fabs(field.values(i, j));
      const double margin = envelope - v;
      if (margin < worst_margin) {
        worst_margin = margin;
        worst_measured = v;
        worst_bound = envelope;
        worst_loc = {i, j, t, g.x(j)};
      }
    }
  }
  out.measured = worst_measured;
  out.bound = worst_bound;
  out.slack = worst_margin;
  out.witness = worst_loc;
  out.witness_component = "pointwise";
  out.pass = worst_margin >= -1e-12 * std::max(std::fabs(worst_bound), worst_measured);
  return out;
}

}  // namespace

std::vector<BoundCheckResult> bound_check_G(int trials, const OperatorContext& ctx, double r,
                                            double A, std::uint64_t seed) {
  std::vector<BoundCheckResult> out(trials);
  parallel_for(trials, [&](int m) {
    Field u = random_smooth_field(ctx.grid, trial_seed(seed, m, 1), r);
    Field gu = apply_G(u, ctx);
    out[m] = norm_bound_result("G_norm_trial_" + std::to_string(m), gu, 4.0 * r * A);
  });
  return out;
}

std::vector<BoundCheckResult> bound_check_F(int trials, const OperatorContext& ctx, double r,
                                            double A, std::uint64_t seed) {
  const double L = ctx.problem.L;
  const double bound_f = 4.0 * (r + ctx.problem.sum_r_pow()) * A;
  std::vector<BoundCheckResult> out(4 * trials);
  parallel_for(trials, [&](int m) {
    Field u = random_smooth_field(ctx.grid, trial_seed(seed, m, 2), r);
    Field fu = apply_F(u, ctx);
    const std::string tag = "_trial_" + std::to_string(m);
    out[4 * m] = norm_bound_result("F_norm" + tag, fu, bound_f);
    Field f1 = apply_F1(u, ctx);
    Field f2 = apply_F2(u, ctx);
    Field f3(ctx.grid, f1.values);
    for (int j = 0; j < ctx.grid.nx; ++j)
      f3.values.col(j) += ctx.grid.x(j) * f2.values.col(j);
    out[4 * m + 1] = pointwise_bound_result("F1_pointwise" + tag, f1, ctx, 2.0 * L * L, L);
    out[4 * m + 2] = pointwise_bound_result("F2_pointwise" + tag, f2, ctx, 2.0 * L, 1.0);
    out[4 * m + 3] =
        pointwise_bound_result("F3_pointwise" + tag, f3, ctx, 4.0 * L * L, 2.0 * L);
  });
  return out;
}

LipschitzProbe lipschitz_probe(int pairs, const OperatorContext& ctx, double eps, double R,
                               std::uint64_t seed) {
  std::vector<double> ratios(pairs, -1.0);
  parallel_for(pairs, [&](int m) {
    std::mt19937_64 rng(trial_seed(seed, m, 3));
    const double su = uniform(rng, 0.1, 1.0) * R;
    const double sv = uniform(rng, 0.1, 1.0) * R;
    Field u = random_smooth_field(ctx.grid, trial_seed(seed, m, 4), su);
    Field v = random_smooth_field(ctx.grid, trial_seed(seed, m, 5), sv);
    Field tu = apply_T_raw(u, ctx, eps);
    Field tv = apply_T_raw(v, ctx, eps);
    Field num(ctx.grid, (u.values - tu.values) - (v.values - tv.values));
    Field den(ctx.grid, u.values - v.values);
    const double dn = e_norm(den).total;
    if (dn == 0.0) return;  // degenerate pair
    ratios[m] = e_norm(num).total / dn;
  });
  LipschitzProbe probe;
  probe.min_ratio = std::numeric_limits<double>::infinity();
  probe.max_ratio = -std::numeric_limits<double>::infinity();
  for (double q : ratios) {
    if (q < 0.0) {
      ++probe.degenerate_skipped;
      continue;
    }
    ++probe.pairs_used;
    probe.min_ratio = std::min(probe.min_ratio, q);
    probe.max_ratio = std::max(probe.max_ratio, q);
  }
  return probe;
}

}  // namespace conewave
