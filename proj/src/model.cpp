#include "pdscatter/model.hpp"

#include <cmath>
#include <numbers>

#include "pdscatter/errors.hpp"
#include "pdscatter/quadrature.hpp"

namespace pdscatter {

namespace {

constexpr double kTailMass = 1e-13;

QuadratureOptions model_tolerance() {
  QuadratureOptions opts;
  opts.abs_tol = 1e-10;
  opts.rel_tol = 1e-10;
  return opts;
}

}  // namespace

double expect_radial(const std::function<double(double)>& g, int d, const RadialLaw& law,
                     const std::vector<double>& breakpoints) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  const double r_max = law.radius_quantile(1.0 - kTailMass, d);
  if (!std::isfinite(r_max) || r_max <= 0.0) throw NumericError("radius truncation point is not finite");
  std::vector<double> cuts = breakpoints;
  // The mode region of the radius density.
  const double mode = law.radius_quantile(0.5, d);
  cuts.push_back(mode);
  cuts.push_back(0.5 * r_max + 0.5 * mode);
  const auto integrand = [&](double r) {
    const double density = law.radius_pdf(r, d);
    return density == 0.0 ? 0.0 : g(r) * density;
  };
  return integrate_pieces(integrand, 0.0, r_max, cuts, model_tolerance());
}

double expect_direction(const std::function<double(double)>& g, int d,
                        const std::vector<double>& breakpoints) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  if (d == 1) return 0.5 * (g(1.0) + g(-1.0));
  // t = cos(phi), phi in [0, pi], density proportional to sin^{d-2}(phi).
  const double norm = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * (d - 1)) - std::lgamma(0.5 * d));
  std::vector<double> cuts;
  for (double t : breakpoints) {
    if (t > -1.0 && t < 1.0) cuts.push_back(std::acos(t));
  }
  cuts.push_back(0.5 * std::numbers::pi);
  const auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    const double jac = d == 2 ? 1.0 : std::pow(s, d - 2);
    return g(std::cos(phi)) * jac;
  };
  return integrate_pieces(integrand, 0.0, std::numbers::pi, cuts, model_tolerance()) / norm;
}

double radial_m0(const RadialLaw& law) { return solve_half_width(law, 0.0, 0.5); }

EllipticalModel EllipticalModel::make(Eigen::VectorXd theta, Eigen::MatrixXd sigma, RadialLaw law) {
  const auto d = sigma.rows();
  if (d < 1 || sigma.cols() != d || theta.size() != d) {
    throw DomainError("model dimensions are inconsistent");
  }
  if (!sigma.allFinite() || !theta.allFinite()) throw DomainError("model entries must be finite");
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * sigma.cwiseAbs().maxCoeff()) {
    throw DomainError("scatter matrix must be symmetric");
  }
  validate_law(law);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (sigma + sigma.transpose()));
  const Eigen::VectorXd values = eig.eigenvalues();
  const double largest = values.maxCoeff();
  if (!(largest > 0.0) || values.minCoeff() <= 1e-12 * largest) {
    throw DomainError("scatter matrix must be positive definite");
  }
  EllipticalModel model;
  model.dim = static_cast<int>(d);
  model.theta = std::move(theta);
  model.sigma = std::move(sigma);
  const Eigen::MatrixXd& q = eig.eigenvectors();
  model.sigma_half = q * values.cwiseSqrt().asDiagonal() * q.transpose();
  model.sigma_half_inv = q * values.cwiseSqrt().cwiseInverse().asDiagonal() * q.transpose();
  model.lambda1 = largest;
  model.m0 = radial_m0(law);
  model.p0 = law.pdf(0.0);
  model.pm0 = law.pdf(model.m0);
  model.law = std::move(law);
  return model;
}

EllipticalModel EllipticalModel::standard(int d, RadialLaw law) {
  return make(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), std::move(law));
}

Eigen::VectorXd EllipticalModel::standardize(const Eigen::VectorXd& x) const {
  if (x.size() != dim) throw DomainError("point dimension does not match the model");
  return sigma_half_inv * (x - theta);
}

}  // namespace pdscatter
