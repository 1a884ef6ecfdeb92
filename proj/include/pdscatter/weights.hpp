#pragma once

namespace pdscatter {

// Inner polynomial of the weight: g(r) = (1 - q(r))^{2i} with
// q(r) = (r/C)^2 (QuadraticBase) or q(r) = (r/C)^{2i} (PowerBase).
enum class WeightForm { QuadraticBase, PowerBase };

struct WeightSpec {
  int order = 2;
  double cutoff = 0.3229;
  double steepness = 2.0;
  WeightForm form = WeightForm::QuadraticBase;
};

// Throws DomainError unless order is 1 or 2, 0 < C < 1 and K > 0.
void validate(const WeightSpec& spec);

// w(r) = (exp(-K g(r)) - exp(-K)) / (1 - exp(-K)) for r < C, 1 for r >= C.
double weight_eval(const WeightSpec& spec, double r);

// dw/dr; zero for r >= C.
double weight_deriv(const WeightSpec& spec, double r);

// C = 1 / (1 + sqrt(d) / Phi^{-1}(3/4)).
double mad_matched_cutoff(int d);

// C = 1 / (1 + sqrt(xi d)).
double xi_cutoff(int d, double xi);

}  // namespace pdscatter
