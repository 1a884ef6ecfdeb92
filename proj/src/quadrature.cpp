#include "pdscatter/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pdscatter/errors.hpp"

namespace pdscatter {

namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Piece {
  double a;
  double b;
  double value;
  double error;
  double l1;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece evaluate(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  double l1 = 0.0;
  const double value = Rule::integrate(f, a, b, 0, 0.0, &err, &l1);
  if (!std::isfinite(value)) throw NumericError("quadrature produced a non-finite value");
  return {a, b, value, err, l1};
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  // Global adaptive bisection: always split the piece with the largest error.
  std::priority_queue<Piece> heap;
  Piece first = evaluate(f, a, b);
  double total = first.value;
  double total_err = first.error;
  double total_l1 = first.l1;
  heap.push(first);
  const int max_pieces = 1 << std::min(opts.max_depth, 14);
  for (int pieces = 1;; ++pieces) {
    // Error estimates below the roundoff of the summed rule cannot improve.
    const double floor = 50.0 * std::numeric_limits<double>::epsilon() * total_l1;
    if (total_err <= std::max({opts.abs_tol, opts.rel_tol * std::fabs(total), floor})) return total;
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (pieces >= max_pieces || !(mid > worst.a && mid < worst.b)) {
      char detail[160];
      std::snprintf(detail, sizeof detail, " near x = %.6g (error estimate %.3g, value %.6g, %d pieces)", worst.a,
                    total_err, total, pieces);
      throw NumericError(std::string("adaptive quadrature did not converge") + detail);
    }
    heap.pop();
    const Piece left = evaluate(f, worst.a, mid);
    const Piece right = evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_l1 += left.l1 + right.l1 - worst.l1;
    heap.push(left);
    heap.push(right);
  }
}

double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> breakpoints, const QuadratureOptions& opts) {
  std::sort(breakpoints.begin(), breakpoints.end());
  double total = 0.0;
  double left = a;
  const double span = b - a;
  const double min_width = 1e-12 * std::max(span, std::fabs(a) + std::fabs(b));
  for (double p : breakpoints) {
    if (p - left <= min_width || b - p <= min_width) continue;
    QuadratureOptions piece = opts;
    piece.abs_tol = opts.abs_tol * (p - left) / span;
    total += integrate(f, left, p, piece);
    left = p;
  }
  QuadratureOptions piece = opts;
  piece.abs_tol = opts.abs_tol * (b - left) / span;
  return total + integrate(f, left, b, piece);
}

GaussLegendreRule gauss_legendre(int n, double a, double b) {
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[n - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[n - 1 - i] = half * w;
  }
  return rule;
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol * std::max(1.0, std::fabs(a) + std::fabs(b))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  double best = x;
  double fbest = f(x);
  for (double e : {lo, hi}) {
    const double fe = f(e);
    if (fe > fbest) {
      fbest = fe;
      best = e;
    }
  }
  return best;
}

}  // namespace pdscatter
