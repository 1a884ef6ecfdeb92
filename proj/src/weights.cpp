#include "pdscatter/weights.hpp"

#include <cmath>
#include <string>

#include "pdscatter/errors.hpp"

namespace pdscatter {

namespace {

constexpr double kPhiInv75 = 0.6744897501960817;

void check_argument(double r) {
  if (!(r >= 0.0) || !(r <= 1.0)) {
    throw DomainError("weight argument must lie in [0, 1], got " + std::to_string(r));
  }
}

double base(const WeightSpec& spec, double r) {
  const double ratio = r / spec.cutoff;
  const double q = spec.form == WeightForm::QuadraticBase ? ratio * ratio
                                                           : std::pow(ratio, 2 * spec.order);
  return 1.0 - q;
}

}  // namespace

void validate(const WeightSpec& spec) {
  if (spec.order != 1 && spec.order != 2) throw DomainError("weight order must be 1 or 2");
  if (!(spec.cutoff > 0.0) || !(spec.cutoff < 1.0)) throw DomainError("weight cutoff C must lie in (0, 1)");
  if (!(spec.steepness > 0.0) || !std::isfinite(spec.steepness)) {
    throw DomainError("weight steepness K must be positive");
  }
}

double weight_eval(const WeightSpec& spec, double r) {
  check_argument(r);
  if (r >= spec.cutoff) return 1.0;
  const double g = std::pow(base(spec, r), 2 * spec.order);
  const double k = spec.steepness;
  return std::expm1(-k * g + k) * std::exp(-k) / -std::expm1(-k);
}

double weight_deriv(const WeightSpec& spec, double r) {
  check_argument(r);
  if (r >= spec.cutoff) return 0.0;
  const int p = 2 * spec.order;
  const double b = base(spec, r);
  const double g = std::pow(b, p);
  const double c = spec.cutoff;
  const double dq = spec.form == WeightForm::QuadraticBase ? 2.0 * r / (c * c)
                                                           : p * std::pow(r, p - 1) / std::pow(c, p);
  const double k = spec.steepness;
  return k * p * std::pow(b, p - 1) * dq * std::exp(-k * g) / -std::expm1(-k);
}

double mad_matched_cutoff(int d) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  return 1.0 / (1.0 + std::sqrt(static_cast<double>(d)) / kPhiInv75);
}

double xi_cutoff(int d, double xi) {
  if (d < 1 || !(xi > 0.0)) throw DomainError("xi cutoff needs d >= 1 and xi > 0");
  return 1.0 / (1.0 + std::sqrt(xi * d));
}

}  // namespace pdscatter
