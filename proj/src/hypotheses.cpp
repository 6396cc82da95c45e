#include "conewave/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "conewave/quad.hpp"

namespace conewave {

namespace {

// tolerance scale: the magnitudes being compared, never an absolute floor
// (the constants A and A/b1 are legitimately ~1e-13 and ~1e-25)
double scale_of(double a, double b) { return std::max(std::fabs(a), std::fabs(b)); }

std::string loc_t(double t) {
  std::ostringstream os;
  os << "t=" << t;
  return os.str();
}

std::string loc_x(double x) {
  std::ostringstream os;
  os << "x=" << x;
  return os.str();
}

std::string loc_txu(double t, double x, double u) {
  std::ostringstream os;
  os << "t=" << t << ",x=" << x << ",u=" << u;
  return os.str();
}

}  // namespace

CheckRecord make_check(const std::string& name, double lhs, const std::string& relation,
                       double rhs, const std::string& location, const std::string& note) {
  CheckRecord r;
  r.name = name;
  r.lhs = lhs;
  r.relation = relation;
  r.rhs = rhs;
  r.location = location;
  r.note = note;
  const bool greater = relation == ">=" || relation == ">";
  r.slack = greater ? lhs - rhs : rhs - lhs;
  const bool strict = relation == "<" || relation == ">";
  const double tol = 1e-12 * scale_of(lhs, rhs);
  r.pass = strict ? r.slack > tol : r.slack >= -tol;
  return r;
}

double compute_B1(double L) {
  if (!(L > 0.0)) throw std::invalid_argument("compute_B1: L must be positive");
  const double L2 = L * L;
  return std::max({1.0, 2.0 * L, 2.0 * L2, 2.0 * L2 * L, 2.0 * L2 * L2});
}

// ---------------------------------------------------------------------------
// H1: 0 <= f(t,x,u) <= sum_j c_j(t,x) |u|^{p_j}, sampled over a box.

std::vector<CheckRecord> check_H1(const ProblemSpec& spec, const CertifyOptions& opt) {
  const double r = spec.constants.r;
  double worst_lower = std::numeric_limits<double>::infinity();
  double worst_upper = std::numeric_limits<double>::infinity();
  std::string lower_at, upper_at;
  for (int it = 0; it < opt.h1_samples_t; ++it) {
    const double t = spec.t_max * it / (opt.h1_samples_t - 1);
    for (int ix = 0; ix < opt.h1_samples_x; ++ix) {
      const double x = spec.L * ix / (opt.h1_samples_x - 1);
      for (int iu = 0; iu < opt.h1_samples_u; ++iu) {
        const double u = -r + 2.0 * r * iu / (opt.h1_samples_u - 1);
        const double fv = eval(spec.f, Env::txu(t, x, u));
        double envelope = 0.0;
        for (const auto& term : spec.growth)
          envelope += eval(term.c, Env::tx(t, x)) * std::pow(std::fabs(u), term.p);
        if (fv < worst_lower) {
          worst_lower = fv;
          lower_at = loc_txu(t, x, u);
        }
        if (envelope - fv < worst_upper) {
          worst_upper = envelope - fv;
          upper_at = loc_txu(t, x, u);
        }
      }
    }
  }
  const std::string caveat = "sampled check, not exhaustive";
  return {
      make_check("h1_f_nonnegative", 0.0, "<=", worst_lower, lower_at, caveat),
      make_check("h1_f_growth_envelope", 0.0, "<=", worst_upper, upper_at, caveat),
  };
}

// ---------------------------------------------------------------------------
// H2: endpoint compatibility and ranges of the initial data.

namespace {

// derivative at the right endpoint via the five-point one-sided stencil,
// exact for polynomials of degree <= 4
double right_derivative(const Expr& e, double L, double h) {
  auto f = [&](double x) { return eval(e, Env::only_x(x)); };
  return (25.0 * f(L) - 48.0 * f(L - h) + 36.0 * f(L - 2 * h) - 16.0 * f(L - 3 * h) +
          3.0 * f(L - 4 * h)) /
         (12.0 * h);
}

struct RangeScan {
  double min = 0.0, max = 0.0;
  double argmin = 0.0, argmax = 0.0;
};

RangeScan scan_1d(const Expr& e, double a, double b, int n) {
  RangeScan s;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double x = a + (b - a) * j / (n - 1);
    const double v = eval(e, Env::only_x(x));
    if (v < s.min) {
      s.min = v;
      s.argmin = x;
    }
    if (v > s.max) {
      s.max = v;
      s.argmax = x;
    }
  }
  return s;
}

// golden-section refinement of a local maximum around x0
double refine_max(const Expr& e, double a, double b, double x0, double step) {
  double lo = std::max(a, x0 - step);
  double hi = std::min(b, x0 + step);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = eval(e, Env::only_x(c));
  double fd = eval(e, Env::only_x(d));
  for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::fabs(hi)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = eval(e, Env::only_x(c));
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = eval(e, Env::only_x(d));
    }
  }
  return std::max({fc, fd, eval(e, Env::only_x(x0))});
}

}  // namespace

std::vector<CheckRecord> check_H2(const ProblemSpec& spec, const CertifyOptions& opt) {
  const double L = spec.L;
  const double r = spec.constants.r;
  const double h = spec.make_grid().dx() / 16.0;
  const int n = opt.h2_samples;
  std::vector<CheckRecord> out;

  out.push_back(make_check("h2_u0_at_0", std::fabs(eval(spec.u0, Env::only_x(0.0))), "<=", 1e-8));
  out.push_back(make_check("h2_u1_at_0", std::fabs(eval(spec.u1, Env::only_x(0.0))), "<=", 1e-8));
  out.push_back(make_check("h2_u0x_at_L", std::fabs(right_derivative(spec.u0, L, h)), "<=", 1e-8,
                           loc_x(L)));
  out.push_back(make_check("h2_u1x_at_L", std::fabs(right_derivative(spec.u1, L, h)), "<=", 1e-8,
                           loc_x(L)));

  RangeScan s0 = scan_1d(spec.u0, 0.0, L, n);
  RangeScan s1 = scan_1d(spec.u1, 0.0, L, n);
  const double sup_u0 = refine_max(spec.u0, 0.0, L, s0.argmax, L / (n - 1));
  const double sup_u1 = refine_max(spec.u1, 0.0, L, s1.argmax, L / (n - 1));
  out.push_back(make_check("h2_u0_nonnegative", 0.0, "<=", s0.min, loc_x(s0.argmin)));
  out.push_back(make_check("h2_u1_nonnegative", 0.0, "<=", s1.min, loc_x(s1.argmin)));
  out.push_back(make_check("h2_u0_sup_below_r", sup_u0, "<", r, loc_x(s0.argmax),
                           "sup refined by golden section"));
  out.push_back(make_check("h2_u1_sup_below_r", sup_u1, "<", r, loc_x(s1.argmax),
                           "sup refined by golden section"));

  RangeScan win = scan_1d(spec.u0, L / 3.0, L / 2.0, n);
  out.push_back(make_check("h2_u0_positive_window", win.min, ">", 0.0, loc_x(win.argmin),
                           "window [L/3, L/2]"));
  return out;
}

// ---------------------------------------------------------------------------
// H3: pure arithmetic on the constants.

std::vector<CheckRecord> check_H3(const HypothesisConstants& c, const std::vector<double>& p_list,
                                  double r, const CertifyOptions&) {
  double sum_rp = 0.0;
  for (double p : p_list) sum_rp += std::pow(r, p);
  std::vector<CheckRecord> out;
  // eps, A in (0,1) folded into one record: slack is the worst of the four
  // gaps.  Strict positivity cannot use an absolute floor because A is
  // legitimately tiny.
  CheckRecord interval;
  interval.name = "h3_eps_A_in_unit_interval";
  interval.lhs = c.epsilon;
  interval.rhs = c.A;
  interval.relation = "in(0,1)";
  interval.slack = std::min({c.epsilon, 1.0 - c.epsilon, c.A, 1.0 - c.A});
  interval.pass = c.epsilon > 0.0 && 1.0 - c.epsilon > 1e-12 && c.A > 0.0 && 1.0 - c.A > 1e-12;
  out.push_back(interval);
  out.push_back(make_check("h3_4A_below_eps", 4.0 * c.A, "<", c.epsilon));
  out.push_back(make_check("h3_R_at_least_r", c.R, ">=", r));
  out.push_back(make_check("h3_b1_above_1", c.b1, ">", 1.0));
  const double lhs2 = c.epsilon * r + 4.0 * (r + sum_rp) * c.A;
  out.push_back(make_check("h3_smallness", lhs2, "<=", (c.epsilon - 4.0 * c.A) * c.R));
  const double lhs3 = 4.0 * (r + 2.0 * c.R + sum_rp) * c.A;
  out.push_back(make_check("h3_separation", lhs3, "<", 1.0 / c.b1));
  return out;
}

// ---------------------------------------------------------------------------
// H4: the growth inequalities on the weight g.

namespace {

constexpr int kXPanels = 8;

double poly_growth(double t) {
  return 1.0 + t + t * t + t * t * t + t * t * t * t;
}

// int_0^L w(t, x) dx by composite Gauss
double x_mass(const Expr& e, double t, double L) {
  return integrate_1d([&](double x) { return eval(e, Env::tx(t, x)); }, 0.0, L,
                      {QuadRule::Kind::GaussLegendre, 8, kXPanels});
}

int default_h4_samples(double t_max) {
  double n = 2048.0 * t_max;
  n = std::clamp(n, 4096.0, 131072.0);
  return int(n) + 1;
}

}  // namespace

std::vector<CheckRecord> check_H4(const ProblemSpec& spec, double t_max, const CertifyOptions& opt,
                                  H4Diagnostic* diagnostic) {
  const double L = spec.L;
  const double A = spec.constants.A;
  const double B1 = compute_B1(L);
  const int n = opt.h4_samples > 0 ? opt.h4_samples : default_h4_samples(t_max);
  const double h = t_max / (n - 1);

  std::vector<CheckRecord> out;

  // precondition: g >= 0 on a dense sample
  {
    double gmin = std::numeric_limits<double>::infinity();
    double at_t = 0.0, at_x = 0.0;
    const int nxs = 65;
    for (int i = 0; i < n; i += 8) {
      const double t = i * h;
      for (int j = 0; j < nxs; ++j) {
        const double x = L * j / (nxs - 1);
        const double v = eval(spec.g, Env::tx(t, x));
        if (v < gmin) {
          gmin = v;
          at_t = t;
          at_x = x;
        }
      }
    }
    out.push_back(make_check("h4_g_nonnegative", 0.0, "<=", gmin,
                             loc_t(at_t) + "," + loc_x(at_x)));
  }

  // gbar(t) = int_0^L g(t, x) dx sampled on the dense t grid
  Eigen::VectorXd gbar(n);
  for (int i = 0; i < n; ++i) gbar[i] = x_mass(spec.g, i * h, L);
  Eigen::VectorXd J = prefix_integral(gbar, h);

  // (i): sup_t B1 (1 + t + ... + t^4) J(t) <= A
  double sup_i = -std::numeric_limits<double>::infinity();
  int sup_idx = 0;
  int first_violation = -1;
  for (int i = 0; i < n; ++i) {
    const double v = B1 * poly_growth(i * h) * J[i];
    if (v > sup_i) {
      sup_i = v;
      sup_idx = i;
    }
    if (first_violation < 0 && v > A) first_violation = i;
  }
  out.push_back(make_check("h4_i_growth_vs_A", sup_i, "<=", A, loc_t(sup_idx * h)));

  if (diagnostic) {
    H4Diagnostic d;
    d.sup = sup_i;
    d.sup_t = sup_idx * h;
    const double m_end = B1 * poly_growth((n - 1) * h) * J[n - 1];
    const double m_prev = B1 * poly_growth((n - 2) * h) * J[n - 2];
    d.increasing_at_t_max = m_end > m_prev;
    if (first_violation > 0) {
      // refine the crossing inside (t_{k-1}, t_k) by bisection
      double lo = (first_violation - 1) * h;
      double hi = first_violation * h;
      const double j_lo = J[first_violation - 1];
      auto value_at = [&](double t) {
        const double dj = integrate_1d([&](double s) { return x_mass(spec.g, s, L); }, lo, t,
                                       {QuadRule::Kind::GaussLegendre, 8, 4});
        return B1 * poly_growth(t) * (j_lo + dj) - A;
      };
      double a = lo, b = hi;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (a + b);
        (value_at(mid) > 0.0 ? b : a) = mid;
      }
      d.first_crossing_t = 0.5 * (a + b);
    } else if (first_violation == 0) {
      d.first_crossing_t = 0.0;
    } else if (d.increasing_at_t_max && J[n - 1] > 0.0) {
      // quartic-growth prediction with the accumulated mass frozen at t_max
      auto value_at = [&](double t) { return B1 * poly_growth(t) * J[n - 1] - A; };
      if (value_at(t_max) < 0.0) {
        double a = t_max, b = t_max;
        do b *= 2.0; while (value_at(b) < 0.0 && b < 1e12);
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (a + b);
          (value_at(mid) > 0.0 ? b : a) = mid;
        }
        d.extrapolated_crossing_t = 0.5 * (a + b);
      }
    }
    *diagnostic = d;
  }

  // (ii): same with the inner growth-coefficient mass, one record per j
  for (std::size_t jj = 0; jj < spec.growth.size(); ++jj) {
    const Expr& c = spec.growth[jj].c;
    Eigen::VectorXd cbar(n);
    for (int i = 0; i < n; ++i) cbar[i] = x_mass(c, i * h, L);
    Eigen::VectorXd K = prefix_integral(cbar, h);
    Eigen::VectorXd integrand(n);
    for (int i = 0; i < n; ++i) integrand[i] = gbar[i] * K[i];
    Eigen::VectorXd JK = prefix_integral(integrand, h);
    double sup = -std::numeric_limits<double>::infinity();
    int idx = 0;
    for (int i = 0; i < n; ++i) {
      const double v = B1 * poly_growth(i * h) * JK[i];
      if (v > sup) {
        sup = v;
        idx = i;
      }
    }
    out.push_back(make_check("h4_ii_growth_vs_A_j" + std::to_string(jj + 1), sup, "<=", A,
                             loc_t(idx * h)));
  }

  // (iii): localized lower bound
  {
    const QuadRule rule{QuadRule::Kind::GaussLegendre, 8, 16};
    const double mass_tx = integrate_2d(
        [&](double t, double x) {
          return (2.0 - t) * (2.0 - t) * (L - x) * (L - x) * eval(spec.g, Env::tx(t, x));
        },
        1.0, 1.5, L / 2.0, 2.0 * L / 3.0, rule);
    const double mass_u0 = integrate_1d(
        [&](double x) { return x * eval(spec.u0, Env::only_x(x)); }, L / 3.0, L / 2.0, rule);
    const double lhs = (1.0 - spec.constants.m) / 4.0 * mass_tx * mass_u0;
    out.push_back(make_check("h4_iii_localized_lower_bound", lhs, ">=", A / spec.constants.b1));
  }
  return out;
}

Certificate certify(const ProblemSpec& spec, const CertifyOptions& opt) {
  Certificate cert;
  cert.grid = spec.make_grid();
  cert.t_max = spec.t_max;
  cert.options = opt;
  cert.h4_samples = opt.h4_samples > 0 ? opt.h4_samples : default_h4_samples(spec.t_max);
  spec.validate();
  try {
    auto h1 = check_H1(spec, opt);
    cert.checks.insert(cert.checks.end(), h1.begin(), h1.end());
    auto h2 = check_H2(spec, opt);
    cert.checks.insert(cert.checks.end(), h2.begin(), h2.end());
    std::vector<double> p_list;
    for (const auto& term : spec.growth) p_list.push_back(term.p);
    auto h3 = check_H3(spec.constants, p_list, spec.constants.r, opt);
    cert.checks.insert(cert.checks.end(), h3.begin(), h3.end());
    H4Diagnostic diag;
    auto h4 = check_H4(spec, spec.t_max, opt, &diag);
    cert.checks.insert(cert.checks.end(), h4.begin(), h4.end());
    cert.h4_diagnostic = diag;
  } catch (const std::exception& e) {
    cert.error = e.what();
    cert.overall_pass = false;
    return cert;
  }
  cert.overall_pass = !cert.checks.empty();
  for (const auto& c : cert.checks) cert.overall_pass = cert.overall_pass && c.pass;
  return cert;
}

}  // namespace conewave
