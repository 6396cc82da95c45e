#include "conewave/quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace conewave {

void QuadRule::validate() const {
  if (order < 2) throw std::invalid_argument("quad: order must be at least 2");
  if (panels < 1) throw std::invalid_argument("quad: panels must be at least 1");
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  nodes.resize(n);
  weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    nodes[i] = -z;
    nodes[n - 1 - i] = z;
    weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

namespace {

const Eigen::VectorXd& cached_gauss_nodes(int n, const Eigen::VectorXd** weights) {
  static std::mutex mu;
  static std::map<int, std::pair<Eigen::VectorXd, Eigen::VectorXd>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    Eigen::VectorXd x, w;
    gauss_legendre(n, x, w);
    it = cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first;
  }
  *weights = &it->second.second;
  return it->second.first;
}

double check_sample(double v) {
  if (!std::isfinite(v)) throw std::runtime_error("quad: non-finite integrand sample");
  return v;
}

}  // namespace

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const QuadRule& rule) {
  rule.validate();
  if (a > b) throw std::invalid_argument("integrate_1d: requires a <= b");
  if (a == b) return 0.0;
  const double width = (b - a) / rule.panels;
  double total = 0.0;
  if (rule.kind == QuadRule::Kind::GaussLegendre) {
    const Eigen::VectorXd* w = nullptr;
    const Eigen::VectorXd& x = cached_gauss_nodes(rule.order, &w);
    for (int p = 0; p < rule.panels; ++p) {
      const double mid = a + (p + 0.5) * width;
      const double half = 0.5 * width;
      double s = 0.0;
      for (int q = 0; q < rule.order; ++q) s += (*w)[q] * check_sample(f(mid + half * x[q]));
      total += half * s;
    }
  } else {
    for (int p = 0; p < rule.panels; ++p) {
      const double lo = a + p * width;
      const double hi = lo + width;
      const double mid = 0.5 * (lo + hi);
      total += (width / 6.0) *
               (check_sample(f(lo)) + 4.0 * check_sample(f(mid)) + check_sample(f(hi)));
    }
  }
  return total;
}

double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                    double c, double d, const QuadRule& rule) {
  return integrate_1d(
      [&](double t) {
        return integrate_1d([&](double x) { return f(t, x); }, c, d, rule);
      },
      a, b, rule);
}

// ---------------------------------------------------------------------------
// Prefix quadrature

namespace {

// Start rows: int_0^i of the degree-4 Lagrange basis on nodes {0..4}.
constexpr double kStart[4][5] = {
    {251.0 / 720, 323.0 / 360, -11.0 / 30, 53.0 / 360, -19.0 / 720},
    {29.0 / 90, 62.0 / 45, 4.0 / 15, 2.0 / 45, -1.0 / 90},
    {27.0 / 80, 51.0 / 40, 9.0 / 10, 21.0 / 40, -3.0 / 80},
    {14.0 / 45, 64.0 / 45, 8.0 / 15, 64.0 / 45, 14.0 / 45},
};

// Tail rows: int_{4-r}^4 of the same basis (mirror of the start rows).
constexpr double kTail[3][5] = {
    {-19.0 / 720, 53.0 / 360, -11.0 / 30, 323.0 / 360, 251.0 / 720},
    {-1.0 / 90, 2.0 / 45, 4.0 / 15, 62.0 / 45, 29.0 / 90},
    {-3.0 / 80, 21.0 / 40, 9.0 / 10, 51.0 / 40, 27.0 / 80},
};

double dot5(const double* c, const Eigen::VectorXd& w, int base) {
  return c[0] * w[base] + c[1] * w[base + 1] + c[2] * w[base + 2] + c[3] * w[base + 3] +
         c[4] * w[base + 4];
}

// Cumulative Simpson fallback for grids with fewer than five nodes.
Eigen::VectorXd prefix_small(const Eigen::VectorXd& w, double h) {
  const int n = int(w.size());
  Eigen::VectorXd out(n);
  out[0] = 0.0;
  if (n >= 2) {
    if (n >= 3) {
      out[1] = h * (5.0 * w[0] + 8.0 * w[1] - w[2]) / 12.0;
      out[2] = h * (w[0] + 4.0 * w[1] + w[2]) / 3.0;
    } else {
      out[1] = h * 0.5 * (w[0] + w[1]);
    }
    if (n == 4) out[3] = out[2] + h * (-w[1] + 8.0 * w[2] + 5.0 * w[3]) / 12.0;
  }
  return out;
}

}  // namespace

Eigen::VectorXd prefix_integral(const Eigen::VectorXd& w, double h) {
  const int n = int(w.size());
  if (n < 1) throw std::invalid_argument("prefix_integral: empty input");
  if (!(h > 0.0)) throw std::invalid_argument("prefix_integral: spacing must be positive");
  if (n < 5) return prefix_small(w, h);
  Eigen::VectorXd out(n);
  out[0] = 0.0;
  for (int i = 1; i <= 4; ++i) out[i] = h * dot5(kStart[i - 1], w, 0);
  double blocks = dot5(kStart[3], w, 0);  // Boole over [0, s_4]
  int block_end = 4;
  for (int i = 5; i < n; ++i) {
    const int r = i % 4;
    if (r == 0) {
      blocks += dot5(kStart[3], w, block_end);
      block_end = i;
      out[i] = h * blocks;
    } else {
      out[i] = h * (blocks + dot5(kTail[r - 1], w, i - 4));
    }
  }
  return out;
}

Eigen::VectorXd prefix_weights(int i, int n, double h) {
  if (i < 0 || i >= n) throw std::invalid_argument("prefix_weights: index out of range");
  if (n < 5) {
    // mirror prefix_small as explicit weights
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    if (i == 1 && n >= 3) {
      w[0] = 5.0 / 12;
      w[1] = 8.0 / 12;
      w[2] = -1.0 / 12;
    } else if (i == 1) {
      w[0] = w[1] = 0.5;
    } else if (i == 2) {
      w[0] = 1.0 / 3;
      w[1] = 4.0 / 3;
      w[2] = 1.0 / 3;
    } else if (i == 3) {
      w[0] = 1.0 / 3;
      w[1] = 4.0 / 3 - 1.0 / 12;
      w[2] = 1.0 / 3 + 8.0 / 12;
      w[3] = 5.0 / 12;
    }
    return h * w;
  }
  const int len = i < 4 ? 5 : i + 1;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(len);
  if (i == 0) return w;
  if (i <= 4) {
    for (int k = 0; k < 5; ++k) w[k] = kStart[i - 1][k];
    return h * w;
  }
  const int r = i % 4;
  for (int base = 0; base + 4 <= i - r; base += 4)
    for (int k = 0; k < 5; ++k) w[base + k] += kStart[3][k];
  if (r != 0)
    for (int k = 0; k < 5; ++k) w[i - 4 + k] += kTail[r - 1][k];
  return h * w;
}

Eigen::VectorXd volterra_moment(const Eigen::VectorXd& w, int k, double h) {
  if (k != 1 && k != 2) throw std::invalid_argument("volterra_moment: kernel power must be 1 or 2");
  const int n = int(w.size());
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s[i] = i * h;
  Eigen::VectorXd m0 = prefix_integral(w, h);
  Eigen::VectorXd m1 = prefix_integral((s.array() * w.array()).matrix(), h);
  Eigen::VectorXd out(n);
  if (k == 1) {
    for (int i = 0; i < n; ++i) out[i] = s[i] * m0[i] - m1[i];
  } else {
    Eigen::VectorXd m2 = prefix_integral((s.array().square() * w.array()).matrix(), h);
    for (int i = 0; i < n; ++i) out[i] = s[i] * s[i] * m0[i] - 2.0 * s[i] * m1[i] + m2[i];
  }
  return out;
}

namespace {

// int_a^b (x - xi)^2 q(xi) dxi for the quadratic q fitted through
// (s0, q0), (s0+h, q1), (s0+2h, q2), in closed form.
double kernel_tail(double x, double a, double b, double s0, double h, double q0, double q1,
                   double q2) {
  // quadratic coefficients in xi
  const double d1 = (q1 - q0) / h;
  const double d2 = (q2 - 2.0 * q1 + q0) / (2.0 * h * h);
  // q(xi) = c0 + c1 xi + c2 xi^2
  const double c2 = d2;
  const double c1 = d1 - d2 * (2.0 * s0 + h);
  const double c0 = q0 - d1 * s0 + d2 * s0 * (s0 + h);
  // (x - xi)^2 (c0 + c1 xi + c2 xi^2) expanded in xi
  const double p0 = c0 * x * x;
  const double p1 = c1 * x * x - 2.0 * c0 * x;
  const double p2 = c2 * x * x - 2.0 * c1 * x + c0;
  const double p3 = -2.0 * c2 * x + c1;
  const double p4 = c2;
  auto anti = [&](double v) {
    return v * (p0 + v * (p1 / 2 + v * (p2 / 3 + v * (p3 / 4 + v * p4 / 5))));
  };
  return anti(b) - anti(a);
}

}  // namespace

double integrate_x_kernel(const Eigen::VectorXd& w, double x, double h) {
  const int n = int(w.size());
  if (n < 3) throw std::invalid_argument("integrate_x_kernel: need at least 3 nodes");
  const double length = (n - 1) * h;
  if (x < -1e-12 * length || x > length * (1.0 + 1e-12))
    throw std::domain_error("integrate_x_kernel: x outside [0, L]");
  x = std::clamp(x, 0.0, length);
  Eigen::VectorXd s(n);
  for (int j = 0; j < n; ++j) s[j] = j * h;
  Eigen::VectorXd n0 = prefix_integral(w, h);
  Eigen::VectorXd n1 = prefix_integral((s.array() * w.array()).matrix(), h);
  Eigen::VectorXd n2 = prefix_integral((s.array().square() * w.array()).matrix(), h);
  int j = std::min(int(std::floor(x / h + 1e-12)), n - 1);
  double base = x * x * n0[j] - 2.0 * x * n1[j] + n2[j];
  const double xj = j * h;
  if (x - xj <= 1e-12 * length) return base;
  const int c = std::clamp(j, 1, n - 2);  // quadratic fit centered near the cell
  return base + kernel_tail(x, xj, x, (c - 1) * h, h, w[c - 1], w[c], w[c + 1]);
}

Eigen::VectorXd x_kernel_at_nodes(const Eigen::VectorXd& w, double h) {
  const int n = int(w.size());
  Eigen::VectorXd s(n);
  for (int j = 0; j < n; ++j) s[j] = j * h;
  Eigen::VectorXd n0 = prefix_integral(w, h);
  Eigen::VectorXd n1 = prefix_integral((s.array() * w.array()).matrix(), h);
  Eigen::VectorXd n2 = prefix_integral((s.array().square() * w.array()).matrix(), h);
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j) out[j] = s[j] * s[j] * n0[j] - 2.0 * s[j] * n1[j] + n2[j];
  return out;
}

}  // namespace conewave
