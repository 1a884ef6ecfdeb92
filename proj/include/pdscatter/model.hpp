#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "pdscatter/univariate.hpp"

namespace pdscatter {

// E g(||Z||) for the spherical Z induced by `law` in dimension d. The range
// is truncated at the radius quantile 1 - 1e-13 and split at `breakpoints`.
double expect_radial(const std::function<double(double)>& g, int d, const RadialLaw& law,
                     const std::vector<double>& breakpoints = {});

// E g(U_1) for U uniform on the unit sphere of R^d. Breakpoints are given in
// the t = U_1 coordinate. For d = 1 this is (g(1) + g(-1)) / 2.
double expect_direction(const std::function<double(double)>& g, int d,
                        const std::vector<double>& breakpoints = {});

// The m with P(|Y| <= m) = 1/2.
double radial_m0(const RadialLaw& law);

struct EllipticalModel {
  Eigen::VectorXd theta;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_half;
  Eigen::MatrixXd sigma_half_inv;
  RadialLaw law;
  double m0 = 0.0;
  double p0 = 0.0;   // p(0)
  double pm0 = 0.0;  // p(m0)
  double lambda1 = 0.0;
  int dim = 0;

  // Validates Sigma (symmetric, eigenvalues above 1e-12 * largest) and the
  // law, then caches the square roots and m0.
  static EllipticalModel make(Eigen::VectorXd theta, Eigen::MatrixXd sigma,
                              RadialLaw law = standard_normal_law());
  static EllipticalModel standard(int d, RadialLaw law = standard_normal_law());

  // Sigma^{-1/2} (x - theta).
  Eigen::VectorXd standardize(const Eigen::VectorXd& x) const;
};

}  // namespace pdscatter
