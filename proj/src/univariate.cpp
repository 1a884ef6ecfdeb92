#include "pdscatter/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "pdscatter/errors.hpp"

namespace pdscatter {

namespace {

constexpr double kRootTolerance = 1e-12;

void check_contamination(double eps) {
  if (!(eps >= 0.0) || !(eps < 0.5)) {
    throw ContaminationError("contamination fraction must lie in [0, 1/2), got " +
                             std::to_string(eps));
  }
}

// Bisection for an increasing function with f(lo) <= 0, expanding hi until
// f(hi) > 0.
template <class F>
double bisect_increasing(F&& f, double lo, double hi) {
  int expansions = 0;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 1100 || !std::isfinite(hi)) {
      throw NumericError("root bracket expansion failed");
    }
  }
  while (hi - lo > kRootTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RadialLaw standard_normal_law() {
  RadialLaw law;
  law.name = "normal";
  law.cdf = [](double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); };
  law.pdf = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * std::numbers::pi); };
  law.quantile = [](double p) {
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
  };
  law.radius_pdf = [](double r, int d) {
    if (r < 0.0) return 0.0;
    if (r == 0.0) return d == 1 ? std::sqrt(2.0 / std::numbers::pi) : 0.0;
    const double half = 0.5 * d;
    const double log_density = (d - 1) * std::log(r) - 0.5 * r * r -
                               (half - 1.0) * std::numbers::ln2 - std::lgamma(half);
    return std::exp(log_density);
  };
  law.radius_quantile = [](double p, int d) {
    return std::sqrt(boost::math::quantile(boost::math::chi_squared_distribution<double>(d), p));
  };
  return law;
}

RadialLaw student_t_law(double dof) {
  if (!(dof > 0.0)) throw DomainError("student t degrees of freedom must be positive");
  RadialLaw law;
  law.name = "student_t(" + std::to_string(dof) + ")";
  const boost::math::students_t_distribution<double> t(dof);
  law.cdf = [t](double y) { return boost::math::cdf(t, y); };
  law.pdf = [t](double y) { return boost::math::pdf(t, y); };
  law.quantile = [t](double p) { return boost::math::quantile(t, p); };
  // ||Z||^2 / d follows F(d, dof).
  law.radius_pdf = [dof](double r, int d) {
    if (r <= 0.0) return 0.0;
    const boost::math::fisher_f_distribution<double> f(d, dof);
    return boost::math::pdf(f, r * r / d) * 2.0 * r / d;
  };
  law.radius_quantile = [dof](double p, int d) {
    const boost::math::fisher_f_distribution<double> f(d, dof);
    return std::sqrt(d * boost::math::quantile(f, p));
  };
  return law;
}

RadialLaw scaled_law(const RadialLaw& law, double scale) {
  if (!(scale > 0.0)) throw DomainError("law scale must be positive");
  RadialLaw out;
  out.name = law.name + "*" + std::to_string(scale);
  out.cdf = [cdf = law.cdf, scale](double y) { return cdf(y / scale); };
  out.pdf = [pdf = law.pdf, scale](double y) { return pdf(y / scale) / scale; };
  out.quantile = [q = law.quantile, scale](double p) { return scale * q(p); };
  out.radius_pdf = [rp = law.radius_pdf, scale](double r, int d) { return rp(r / scale, d) / scale; };
  out.radius_quantile = [rq = law.radius_quantile, scale](double p, int d) { return scale * rq(p, d); };
  return out;
}

void validate_law(const RadialLaw& law) {
  if (!law.cdf || !law.pdf || !law.quantile || !law.radius_pdf || !law.radius_quantile) {
    throw DomainError("radial law '" + law.name + "' is incomplete");
  }
  for (double y = -6.0; y <= 6.0; y += 0.25) {
    if (std::fabs(law.cdf(-y) - (1.0 - law.cdf(y))) > 1e-12) {
      throw DomainError("radial law '" + law.name + "' is not symmetric about 0");
    }
  }
  for (double p = 0.01; p < 0.995; p += 0.01) {
    if (std::fabs(law.cdf(law.quantile(p)) - p) > 1e-10) {
      throw DomainError("radial law '" + law.name + "': quantile is not the inverse of cdf");
    }
  }
  const double m0 = solve_half_width(law, 0.0, 0.5);
  if (!(law.pdf(0.0) > 0.0) || !(law.pdf(m0) > 0.0)) {
    throw DomainError("radial law '" + law.name + "' needs p(0) p(m0) > 0");
  }
}

double median_of_three(double a, double b, double c) {
  return std::max(std::min(a, b), std::min(std::max(a, b), c));
}

double med_k_inplace(std::span<double> scratch, int k) {
  const auto n = static_cast<long>(scratch.size());
  if (n == 0) throw DomainError("median of an empty sample");
  if (k < 1 || k > n) throw DomainError("med_k needs 1 <= k <= n");
  // 1-based order statistic indices.
  const long lo = (n + k) / 2;
  const long hi = (n + 1 + k) / 2;
  auto lo_it = scratch.begin() + (lo - 1);
  std::nth_element(scratch.begin(), lo_it, scratch.end());
  const double a = *lo_it;
  if (hi == lo) return a;
  const double b = *std::min_element(lo_it + 1, scratch.end());
  return 0.5 * (a + b);
}

double med_k(std::span<const double> xs, int k) {
  std::vector<double> scratch(xs.begin(), xs.end());
  return med_k_inplace(scratch, k);
}

double mad_k(std::span<const double> xs, int k) {
  std::vector<double> scratch(xs.begin(), xs.end());
  if (k < 1 || k > static_cast<long>(scratch.size())) throw DomainError("mad_k needs 1 <= k <= n");
  const double med = med_k_inplace(scratch, 1);
  for (double& v : scratch) v = std::fabs(v - med);
  return med_k_inplace(scratch, k);
}

double solve_d1(const RadialLaw& law, double eps) {
  check_contamination(eps);
  if (eps == 0.0) return 0.0;
  const double target = 1.0 / (2.0 * (1.0 - eps));
  return bisect_increasing([&](double y) { return law.cdf(y) - target; }, 0.0, 1.0);
}

double solve_half_width(const RadialLaw& law, double center, double target) {
  if (!(target > 0.0) || !(target < 1.0)) {
    throw DomainError("half-width target probability must lie in (0, 1)");
  }
  return bisect_increasing(
      [&](double m) { return law.cdf(center + m) - law.cdf(center - m) - target; }, 0.0, 1.0);
}

double solve_m(const RadialLaw& law, double center, double eps, HalfWidth kind) {
  check_contamination(eps);
  const double target = kind == HalfWidth::Lower ? (1.0 - 2.0 * eps) / (2.0 * (1.0 - eps))
                                                 : 1.0 / (2.0 * (1.0 - eps));
  return solve_half_width(law, center, target);
}

MedMad contaminated_med_mad(const RadialLaw& law, double t, double eps) {
  const double d1 = solve_d1(law, eps);
  const double med = median_of_three(-d1, t, d1);
  const double m1 = solve_m(law, med, eps, HalfWidth::Lower);
  const double m2 = solve_m(law, med, eps, HalfWidth::Upper);
  return {med, median_of_three(m1, std::fabs(t - med), m2)};
}

}  // namespace pdscatter
