#include "conewave/grid.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace conewave {

void RectGrid::validate() const {
  if (!(t_max > 0.0)) throw std::invalid_argument("grid: t_max must be positive");
  if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  if (nt < 3) throw std::invalid_argument("grid: nt must be at least 3");
  if (nx < 3) throw std::invalid_argument("grid: nx must be at least 3");
}

Field sample(const Expr& e, const RectGrid& grid) {
  grid.validate();
  Field f(grid);
  for (int i = 0; i < grid.nt; ++i) {
    const double t = grid.t(i);
    for (int j = 0; j < grid.nx; ++j) {
      try {
        f.values(i, j) = eval(e, Env::tx(t, grid.x(j)));
      } catch (const EvalError& err) {
        std::ostringstream os;
        os << err.what() << " at grid node t=" << t << ", x=" << grid.x(j);
        throw EvalError(os.str());
      }
    }
  }
  return f;
}

namespace {

// One-dimensional stencils along a row/column of length n with spacing h.
// get(k) reads the k-th sample, put(k, v) writes the k-th derivative value.

template <class Get, class Put>
void diff1(int n, double h, Get get, Put put) {
  const double inv2h = 1.0 / (2.0 * h);
  put(0, (-3.0 * get(0) + 4.0 * get(1) - get(2)) * inv2h);
  for (int k = 1; k + 1 < n; ++k) put(k, (get(k + 1) - get(k - 1)) * inv2h);
  put(n - 1, (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) * inv2h);
}

template <class Get, class Put>
void diff2(int n, double h, Get get, Put put) {
  const double invh2 = 1.0 / (h * h);
  if (n >= 4) {
    put(0, (2.0 * get(0) - 5.0 * get(1) + 4.0 * get(2) - get(3)) * invh2);
  } else {
    put(0, (get(0) - 2.0 * get(1) + get(2)) * invh2);
  }
  for (int k = 1; k + 1 < n; ++k) put(k, (get(k + 1) - 2.0 * get(k) + get(k - 1)) * invh2);
  if (n >= 4) {
    put(n - 1,
        (2.0 * get(n - 1) - 5.0 * get(n - 2) + 4.0 * get(n - 3) - get(n - 4)) * invh2);
  } else {
    put(n - 1, (get(n - 1) - 2.0 * get(n - 2) + get(n - 3)) * invh2);
  }
}

}  // namespace

Field partial(const Field& f, Partial which) {
  f.grid.validate();
  const int nt = f.grid.nt;
  const int nx = f.grid.nx;
  Field out(f.grid);
  switch (which) {
    case Partial::T:
      for (int j = 0; j < nx; ++j)
        diff1(nt, f.grid.dt(), [&](int k) { return f.values(k, j); },
              [&](int k, double v) { out.values(k, j) = v; });
      break;
    case Partial::TT:
      for (int j = 0; j < nx; ++j)
        diff2(nt, f.grid.dt(), [&](int k) { return f.values(k, j); },
              [&](int k, double v) { out.values(k, j) = v; });
      break;
    case Partial::X:
      for (int i = 0; i < nt; ++i)
        diff1(nx, f.grid.dx(), [&](int k) { return f.values(i, k); },
              [&](int k, double v) { out.values(i, k) = v; });
      break;
    case Partial::XX:
      for (int i = 0; i < nt; ++i)
        diff2(nx, f.grid.dx(), [&](int k) { return f.values(i, k); },
              [&](int k, double v) { out.values(i, k) = v; });
      break;
  }
  return out;
}

double sup_abs(const Field& f, GridLoc* where) {
  double best = 0.0;
  int bi = 0, bj = 0;
  for (int i = 0; i < f.grid.nt; ++i) {
    for (int j = 0; j < f.grid.nx; ++j) {
      double v = std::fabs(f.values(i, j));
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  }
  if (where) *where = {bi, bj, f.grid.t(bi), f.grid.x(bj)};
  return best;
}

EnormBreakdown e_norm(const Field& f) {
  EnormBreakdown b;
  b.sup_u = sup_abs(f);
  b.sup_ut = sup_abs(partial(f, Partial::T));
  b.sup_utt = sup_abs(partial(f, Partial::TT));
  b.sup_ux = sup_abs(partial(f, Partial::X));
  b.sup_uxx = sup_abs(partial(f, Partial::XX));
  b.total = b.sup_u + b.sup_ut + b.sup_utt + b.sup_ux + b.sup_uxx;
  return b;
}

double interp(const Field& f, double t, double x) {
  const RectGrid& g = f.grid;
  const double tol_t = 1e-12 * g.t_max;
  const double tol_x = 1e-12 * g.L;
  if (t < -tol_t || t > g.t_max + tol_t || x < -tol_x || x > g.L + tol_x)
    throw std::domain_error("interp: query outside grid rectangle");
  double ti = std::clamp(t / g.dt(), 0.0, double(g.nt - 1));
  double xj = std::clamp(x / g.dx(), 0.0, double(g.nx - 1));
  int i0 = std::min(int(ti), g.nt - 2);
  int j0 = std::min(int(xj), g.nx - 2);
  double a = ti - i0;
  double b = xj - j0;
  return (1 - a) * (1 - b) * f.values(i0, j0) + a * (1 - b) * f.values(i0 + 1, j0) +
         (1 - a) * b * f.values(i0, j0 + 1) + a * b * f.values(i0 + 1, j0 + 1);
}

void write_csv(const Field& f, std::ostream& os) {
  os << "t,x,value\n";
  char buf[200];
  for (int i = 0; i < f.grid.nt; ++i) {
    for (int j = 0; j < f.grid.nx; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", f.grid.t(i), f.grid.x(j),
                    f.values(i, j));
      os << buf;
    }
  }
}

std::string to_csv(const Field& f) {
  std::ostringstream os;
  write_csv(f, os);
  return os.str();
}

}  // namespace conewave
