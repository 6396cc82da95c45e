#pragma once

#include <Eigen/Dense>
#include <functional>

namespace conewave {

/// Composite quadrature rule for integrands known in closed form.
struct QuadRule {
  enum class Kind { GaussLegendre, Simpson };
  Kind kind = Kind::GaussLegendre;
  int order = 8;    // Gauss nodes per panel
  int panels = 64;

  void validate() const;
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Composite quadrature of f over [a, b].  Requires a <= b; throws if an
/// integrand sample is non-finite.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const QuadRule& rule = QuadRule{});

/// Tensor-product quadrature over [a,b] x [c,d] (t outer, x inner).
double integrate_2d(const std::function<double(double, double)>& f, double a, double b,
                    double c, double d, const QuadRule& rule = QuadRule{});

// ---------------------------------------------------------------------------
// Prefix quadrature on uniform grids.
//
// All running integrals int_0^{s_i} of grid-sampled integrands use one shared
// closed Newton-Cotes construction that is exact for polynomials of degree
// <= 4: full 4-interval Boole blocks plus a partial-block correction row on
// the last five nodes, with degree-4 start rows for i <= 4.  Grids smaller
// than five nodes fall back to a cumulative Simpson variant.

/// P_i = int_0^{s_i} w ds for every node, O(n) total.
Eigen::VectorXd prefix_integral(const Eigen::VectorXd& w, double h);

/// Quadrature weights of the same construction for the single prefix
/// [0, s_i]; the returned vector has i+1 entries unless i < 4, in which case
/// it has min(n, 5) entries (the start rows read up to node 4).
Eigen::VectorXd prefix_weights(int i, int n, double h);

/// V_i = int_0^{s_i} (s_i - s)^k w(s) ds for every node, via binomial
/// expansion into the cumulative moments int_0^{s_i} s^m w(s) ds.
/// Supported kernel powers: k = 1, 2.
Eigen::VectorXd volterra_moment(const Eigen::VectorXd& w, int k, double h);

/// int_0^x (x - x1)^2 w(x1) dx1 for grid-sampled w with spacing h.  The
/// moving endpoint may fall between nodes; the partial cell is integrated
/// against a local quadratic fit of w so the polynomial kernel is handled
/// exactly.
double integrate_x_kernel(const Eigen::VectorXd& w, double x, double h);

/// All-nodes variant: result[j] = int_0^{x_j} (x_j - x1)^2 w(x1) dx1.
Eigen::VectorXd x_kernel_at_nodes(const Eigen::VectorXd& w, double h);

}  // namespace conewave
