#pragma once

#include <functional>
#include <span>
#include <string>

namespace pdscatter {

// A symmetric univariate law Y together with the law of ||Z|| for the
// spherical vector Z whose one-dimensional marginals are distributed as Y.
struct RadialLaw {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(double)> quantile;
  // Density and quantile of the radius ||Z|| in dimension d.
  std::function<double(double, int)> radius_pdf;
  std::function<double(double, int)> radius_quantile;
};

RadialLaw standard_normal_law();

// Multivariate Student t radial law. Experimental: only the Gaussian law is
// validated against tabulated values.
RadialLaw student_t_law(double dof);

// The law of s*Y.
RadialLaw scaled_law(const RadialLaw& law, double scale);

// Checks symmetry, quantile/cdf consistency and p(0) p(m0) > 0 on a test
// grid. Throws DomainError on the first violation.
void validate_law(const RadialLaw& law);

// Order-statistic median (x_(floor((n+k)/2)) + x_(floor((n+1+k)/2))) / 2.
double med_k(std::span<const double> xs, int k);

// Med_k of absolute deviations about the conventional median Med_1.
double mad_k(std::span<const double> xs, int k);

// Same as med_k but reorders `scratch` in place; avoids an allocation in
// inner loops.
double med_k_inplace(std::span<double> scratch, int k);

// Root of P(Y <= d1) = 1 / (2 (1 - eps)).
double solve_d1(const RadialLaw& law, double eps);

enum class HalfWidth { Lower = 1, Upper = 2 };

// Root m >= 0 of P(|Y - center| <= m) = target.
double solve_half_width(const RadialLaw& law, double center, double target);

// m1(c, eps) (target (1-2eps)/(2(1-eps))) or m2(c, eps) (target 1/(2(1-eps))).
double solve_m(const RadialLaw& law, double center, double eps, HalfWidth kind);

struct MedMad {
  double med;
  double mad;
};

// Median and MAD of (1 - eps) Y + eps delta_t.
MedMad contaminated_med_mad(const RadialLaw& law, double t, double eps);

double median_of_three(double a, double b, double c);

}  // namespace pdscatter
