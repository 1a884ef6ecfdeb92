#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pdscatter/asymptotics.hpp"
#include "pdscatter/model.hpp"
#include "pdscatter/weights.hpp"

namespace pdscatter {

struct GeometryValue {
  double f4;
  double f3;
};

// f4 = median{-d1, u1 r, d1}; f3 = median{m1(f4), |u1 r - f4|, m2(f4)}.
GeometryValue geometry(double u1, double r, double eps, const RadialLaw& law);

// Reference suprema over u1 in [0, 1] by a 2049-point grid and golden-section
// refinement of the three best brackets. Every evaluation solves for m1, m2.
double f1_sup(double x1, double x2norm, double r, double eps, const RadialLaw& law);
double f2_sup(double r, double eps, const RadialLaw& law);

// Per-eps cache of d1, m1(d1), m2(d1) and a Hermite table of m1(c) on
// [0, d1]. f1 and f2 exploit the piecewise structure of f3 and f4 in u1.
class ContaminationGeometry {
 public:
  ContaminationGeometry(double eps, const RadialLaw& law, int dim = 2);

  double f1(double x1, double x2norm, double r) const;
  double f2(double r) const;
  double m1_at(double c) const;

  double eps() const { return eps_; }
  double d1() const { return d1_; }
  double big_m1() const { return big_m1_; }
  double big_m2() const { return big_m2_; }

 private:
  double region_a(double a, double b, double r, double u_end) const;
  double region_b(double a, double b, double r, double u_start) const;

  double eps_;
  int dim_;
  double d1_;
  double big_m1_;
  double big_m2_;
  std::vector<double> table_m_;
  std::vector<double> table_dm_;
  double table_step_ = 0.0;
};

struct ContaminationMoments {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double psi1 = 0.0;
  double psi2 = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

// Tensor Gauss-Legendre rule in (R, phi), x1 = R cos(phi), ||x2|| = R sin(phi).
// The radial range is split at s0^{-1}(C2) into two panels; for eps > 0 half
// of the angular nodes go to a panel of half-width min(pi/4, 8 sqrt(d1))
// around phi = pi/2.
struct MomentRule {
  int radial = 200;
  int angular = 200;
};

struct BiasCoeffs {
  double b1;
  double b2;
};

// Caches the asymptotic constants, the quadrature nodes and the geometry of
// the most recent eps.
class MaxBiasEngine {
 public:
  MaxBiasEngine(int d, WeightSpec w1, WeightSpec w2, RadialLaw law = standard_normal_law(),
                MomentRule rule = {});

  const AsymptoticConstants& constants() const { return consts_; }
  const ContaminationGeometry& geometry_for(double eps);
  ContaminationMoments moments(double r, double eps);
  BiasCoeffs coeffs(double r, double eps);

  // sup over r >= 0 of b1(r, eps): log-spaced grid of `grid` points on
  // [1e-3 m0, r_max(eps)] and golden-section refinement of the best bracket.
  double sup_b1(double eps, int grid = 512);
  double r_max(double eps);

  int dim() const { return d_; }

 private:
  void build_angular_rule(double d1);

  int d_;
  WeightSpec w1_;
  WeightSpec w2_;
  RadialLaw law_;
  AsymptoticConstants consts_;
  std::vector<double> r_nodes_;
  std::vector<double> r_weights_;
  int angular_ = 0;
  std::vector<double> cos_nodes_;
  std::vector<double> sin_nodes_;
  std::vector<double> a_weights_;
  std::optional<ContaminationGeometry> cached_;
};

ContaminationMoments contamination_moments(double r, double eps, int d, const WeightSpec& w1, const WeightSpec& w2,
                                           const RadialLaw& law = standard_normal_law(), MomentRule rule = {});

BiasCoeffs bias_coeffs(double r, double eps, int d, const WeightSpec& w1, const WeightSpec& w2,
                       const RadialLaw& law = standard_normal_law(), MomentRule rule = {});

// b1, b2 from the eight moments.
BiasCoeffs bias_from_moments(const ContaminationMoments& m, double r, double c1);

// PWS(F(eps, delta_y)) = c1 Sigma + Sigma^{1/2} (b1 e e' + b2 I) Sigma^{1/2}.
Eigen::MatrixXd contaminated_pws(const Eigen::VectorXd& y, double eps, const EllipticalModel& model,
                                 const WeightSpec& w1, const WeightSpec& w2, MomentRule rule = {});
Eigen::MatrixXd contaminated_pws(const Eigen::VectorXd& y, double eps, const EllipticalModel& model,
                                 MaxBiasEngine& engine);

// lambda1 sup_r b1(r, eps).
double mbi(double eps, const EllipticalModel& model, const WeightSpec& w1, const WeightSpec& w2, int grid = 512,
           MomentRule rule = {});
double mbi(double eps, const EllipticalModel& model, MaxBiasEngine& engine, int grid = 512);

// lambda1 sup_r |t1(r)| / c0.
double csi_gesi(const EllipticalModel& model, const AsymptoticConstants& consts);

// m2(d1(eps), eps) - m0.
double mad_maxbias(double eps, const RadialLaw& law);

enum class BiasKind { MBI, MADBias };

struct BiasCurve {
  std::vector<std::pair<double, double>> points;
  BiasKind kind = BiasKind::MBI;
  std::string model_summary;
};

BiasCurve mbi_curve(const std::vector<double>& eps_grid, const EllipticalModel& model, MaxBiasEngine& engine,
                    int grid = 512);
BiasCurve mad_bias_curve(const std::vector<double>& eps_grid, const RadialLaw& law);

}  // namespace pdscatter
