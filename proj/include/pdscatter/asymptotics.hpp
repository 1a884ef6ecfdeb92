#pragma once

#include <Eigen/Dense>

#include "pdscatter/model.hpp"
#include "pdscatter/weights.hpp"

namespace pdscatter {

struct AsymptoticConstants {
  int d = 0;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double m0 = 0.0;
  double pm0 = 0.0;
  WeightSpec w2;
  RadialLaw law;

  // Radii where the integrands change form: m0 and s0^{-1}(C).
  std::vector<double> breakpoints() const;
};

// 1 / (1 + x/m0).
double s0_eval(double x, double m0);

struct SMoments {
  double s1;
  double s2;
};

// s_i(x) = E U_1^{2(i-1)} sign(|U_1| x - m0).
SMoments s_moments(double x, int d, double m0);

// c0..c3; sigma1 and sigma2 are left at zero.
AsymptoticConstants c_constants(int d, const WeightSpec& w2, const RadialLaw& law = standard_normal_law());

struct TPair {
  double t1;
  double t2;
};

TPair t_funcs(double r, const AsymptoticConstants& consts);

struct SigmaPair {
  double sigma1;
  double sigma2;
};

SigmaPair sigma_pair(const AsymptoticConstants& consts);

// c_constants followed by sigma_pair.
AsymptoticConstants asymptotic_constants(int d, const WeightSpec& w2, const RadialLaw& law = standard_normal_law());

// E t1(||Z||) / d + E t2(||Z||).
double centering_residual(const AsymptoticConstants& consts);

// c1^2 (1 + kappa) / sigma1.
double are_shape(int d, const WeightSpec& w2, double kappa = 0.0, const RadialLaw& law = standard_normal_law());
double are_shape(const AsymptoticConstants& consts, double kappa = 0.0);

// sup_r t1(r) / (c0 (d + 2)).
double g2_index(const AsymptoticConstants& consts);
double g2_index(int d, const WeightSpec& w2, const RadialLaw& law = standard_normal_law());

// sup over r of f, by a 4096-point grid on [0, radius quantile 1 - 1e-10]
// and golden-section refinement of the best bracket.
double sup_over_radius(const std::function<double(double)>& f, const AsymptoticConstants& consts);

Eigen::MatrixXd if_pws(const Eigen::VectorXd& x, const EllipticalModel& model, const AsymptoticConstants& consts);

// Influence of contamination at x on PD(y, F).
double if_pd(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const EllipticalModel& model);

// d^2 x d^2 matrix with K vec(M) = vec(M') for column-stacked vec.
Eigen::MatrixXd commutation_matrix(int d);

Eigen::VectorXd vec(const Eigen::MatrixXd& m);

// sigma1 (I + K)(Sigma (x) Sigma) + sigma2 vec(Sigma) vec(Sigma)'.
Eigen::MatrixXd v_matrix(const AsymptoticConstants& consts, const Eigen::MatrixXd& sigma);

struct LrtLimit {
  double scale;
  int df;
};

// n log phi0 converges to scale * chi^2_df.
LrtLimit lrt_limit_scale(const AsymptoticConstants& consts);

}  // namespace pdscatter
