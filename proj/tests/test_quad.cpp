#include <doctest.h>

#include <cmath>
#include <random>

#include "conewave/quad.hpp"

using namespace conewave;

TEST_SUITE("quad") {
  TEST_CASE("integrate_1d on closed forms") {
    // Beta(3,3): int_0^1 x^2 (1-x)^2 dx = 1/30
    const double beta33 = integrate_1d(
        [](double x) { return x * x * (1 - x) * (1 - x); }, 0.0, 1.0);
    CHECK(beta33 == doctest::Approx(1.0 / 30.0).epsilon(1e-14));

    CHECK(integrate_1d([](double) { return 42.0; }, 0.3, 0.3) == 0.0);  // empty interval

    // Gauss order 8 integrates degree-15 polynomials per panel
    const double p15 = integrate_1d([](double x) { return std::pow(x, 15.0); }, 0.0, 2.0,
                                    {QuadRule::Kind::GaussLegendre, 8, 1});
    CHECK(p15 == doctest::Approx(std::pow(2.0, 16.0) / 16.0).epsilon(1e-13));

    // Simpson flavour
    const double s = integrate_1d([](double x) { return x * x; }, 0.0, 3.0,
                                  {QuadRule::Kind::Simpson, 2, 4});
    CHECK(s == doctest::Approx(9.0).epsilon(1e-14));

    // non-finite integrand sample
    CHECK_THROWS(integrate_1d([](double x) { return std::sqrt(x - 2.0); }, 0.0, 1.0));
    CHECK_THROWS_AS(integrate_1d([](double) { return 1.0; }, 1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("improper integral via substitution") {
    // int_0^inf s^3/(1+s^16) ds = (z = s^4) = int_0^inf dz/(4(1+z^4)) = pi/(8 sqrt 2);
    // the substituted integrand is mapped to [0,1) by z = y/(1-y)
    const double value = integrate_1d(
        [](double y) {
          const double z = y / (1.0 - y);
          const double jac = 1.0 / ((1.0 - y) * (1.0 - y));
          return jac / (4.0 * (1.0 + z * z * z * z));
        },
        0.0, 1.0, {QuadRule::Kind::GaussLegendre, 8, 256});
    CHECK(value == doctest::Approx(M_PI / (8.0 * std::sqrt(2.0))).epsilon(1e-10));
  }

  TEST_CASE("prefix rule is exact through degree 4") {
    const int n = 97;
    const double h = 0.031;
    for (int deg = 0; deg <= 4; ++deg) {
      Eigen::VectorXd w(n);
      for (int i = 0; i < n; ++i) w[i] = std::pow(i * h, double(deg));
      Eigen::VectorXd p = prefix_integral(w, h);
      for (int i = 0; i < n; i += 5) {
        const double s = i * h;
        const double exact = std::pow(s, double(deg + 1)) / (deg + 1);
        CHECK(p[i] == doctest::Approx(exact).epsilon(1e-12).scale(1.0));
      }
    }
  }

  TEST_CASE("prefix weights match the incremental path") {
    const int n = 43;
    const double h = 0.05;
    std::mt19937_64 rng(5);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = std::sin(0.3 * i) + double(rng() % 100) / 100.0;
    Eigen::VectorXd p = prefix_integral(w, h);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd wi = prefix_weights(i, n, h);
      double direct = 0.0;
      for (int j = 0; j < wi.size(); ++j) direct += wi[j] * w[j];
      CHECK(p[i] == doctest::Approx(direct).epsilon(1e-13).scale(1.0));
    }
  }

  TEST_CASE("volterra moments on polynomial loads") {
    const int n = 129;
    const double t_max = 2.0;
    const double h = t_max / (n - 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd v1 = volterra_moment(ones, 1, h);
    Eigen::VectorXd v2 = volterra_moment(ones, 2, h);
    Eigen::VectorXd sq(n);
    for (int i = 0; i < n; ++i) sq[i] = (i * h) * (i * h);
    Eigen::VectorXd v3 = volterra_moment(sq, 2, h);
    for (int i = 0; i < n; i += 8) {
      const double t = i * h;
      CHECK(v1[i] == doctest::Approx(t * t / 2.0).epsilon(1e-13).scale(1.0));
      CHECK(v2[i] == doctest::Approx(t * t * t / 3.0).epsilon(1e-13).scale(1.0));
      CHECK(v3[i] == doctest::Approx(std::pow(t, 5.0) / 30.0).epsilon(1e-12).scale(1.0));
    }
    CHECK_THROWS_AS(volterra_moment(ones, 3, h), std::invalid_argument);
  }

  TEST_CASE("volterra fast path agrees with the direct kernel sum") {
    // brute-force oracle: same prefix weights applied directly to the kernel
    const int n = 201;
    const double h = 2.0 / (n - 1);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      const double s = i * h;
      w[i] = std::exp(-s) * std::sin(3.0 * s) + 0.25 * s * s;
    }
    for (int k : {1, 2}) {
      Eigen::VectorXd fast = volterra_moment(w, k, h);
      for (int i = 0; i < n; i += 13) {
        Eigen::VectorXd wi = prefix_weights(i, n, h);
        double direct = 0.0;
        for (int j = 0; j < wi.size(); ++j)
          direct += wi[j] * std::pow(i * h - j * h, double(k)) * w[j];
        CHECK(fast[i] == doctest::Approx(direct).epsilon(1e-8).scale(1e-6));
      }
    }
  }

  TEST_CASE("volterra curves of non-negative smooth loads are monotone") {
    const int n = 161;
    const double h = 2.0 / (n - 1);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
      const double a = 0.2 + double(rng() % 100) / 100.0;
      const double b = double(rng() % 628) / 100.0;
      Eigen::VectorXd w(n);
      for (int i = 0; i < n; ++i) {
        const double s = i * h;
        const double base = a + std::sin(s + b);
        w[i] = base * base;  // smooth and non-negative
      }
      for (int k : {1, 2}) {
        Eigen::VectorXd v = volterra_moment(w, k, h);
        CHECK(v[0] == 0.0);
        for (int i = 1; i < n; ++i) {
          CHECK(v[i] >= -1e-12);
          CHECK(v[i] >= v[i - 1] - 1e-12);
        }
      }
    }
  }

  TEST_CASE("x kernel integral") {
    const int n = 101;
    const double h = 1.0 / (n - 1);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    // w = 1: result x^3/3 at every node
    Eigen::VectorXd nodes = x_kernel_at_nodes(ones, h);
    for (int j = 0; j < n; j += 10) {
      const double x = j * h;
      CHECK(nodes[j] == doctest::Approx(x * x * x / 3.0).epsilon(1e-13).scale(1.0));
    }
    // w = x1 at x = 1: Beta(2,3) = 1/12
    Eigen::VectorXd lin(n);
    for (int j = 0; j < n; ++j) lin[j] = j * h;
    CHECK(integrate_x_kernel(lin, 1.0, h) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
    // w = 0
    CHECK(integrate_x_kernel(Eigen::VectorXd::Zero(n), 0.7, h) == 0.0);
    // off-node endpoint, quadratic w: still exact
    Eigen::VectorXd sq(n);
    for (int j = 0; j < n; ++j) sq[j] = (j * h) * (j * h);
    const double x = 0.5 * (43 + 44) * h;
    // int_0^x (x-s)^2 s^2 ds = x^5/30
    CHECK(integrate_x_kernel(sq, x, h) ==
          doctest::Approx(std::pow(x, 5.0) / 30.0).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_x_kernel(ones, 1.5, h), std::domain_error);
  }
}
