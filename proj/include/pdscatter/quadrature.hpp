#pragma once

#include <functional>
#include <vector>

namespace pdscatter {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_depth = 18;
};

// Adaptive Gauss-Kronrod (G10/K21) on [a, b] with a mixed absolute/relative
// stopping rule. Throws NumericError when the error bound is not met at the
// maximum subdivision depth.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

// Same, splitting [a, b] at every breakpoint strictly inside it; breakpoints
// closer than 1e-12 of the range to a previous cut or to b are dropped.
double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::vector<double> breakpoints, const QuadratureOptions& opts = {});

struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [a, b].
GaussLegendreRule gauss_legendre(int n, double a, double b);

// Maximum of f over [lo, hi] by golden-section search; assumes unimodality
// inside the bracket. Returns the arg max.
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

}  // namespace pdscatter
