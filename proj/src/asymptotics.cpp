#include "pdscatter/asymptotics.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/beta.hpp>

#include "pdscatter/errors.hpp"
#include "pdscatter/quadrature.hpp"

namespace pdscatter {

namespace {

constexpr int kSupGrid = 4096;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::vector<double> AsymptoticConstants::breakpoints() const {
  return {m0, m0 * (1.0 / w2.cutoff - 1.0)};
}

double s0_eval(double x, double m0) {
  if (!(x >= 0.0)) throw DomainError("s0 needs a nonnegative argument");
  if (!(m0 > 0.0)) throw DomainError("s0 needs m0 > 0");
  if (std::isinf(x)) return 0.0;
  return 1.0 / (1.0 + x / m0);
}

SMoments s_moments(double x, int d, double m0) {
  if (!(x >= 0.0)) throw DomainError("s moments need a nonnegative argument");
  if (d < 1) throw DomainError("dimension must be at least 1");
  if (x <= m0) return {-1.0, -1.0 / d};
  if (std::isinf(x)) return {1.0, 1.0 / d};
  if (d == 1) return {1.0, 1.0};
  // U_1^2 ~ Beta(1/2, (d-1)/2) with a = m0/x; the tails are taken through
  // 1 - U_1^2 so that 1 - a^2 keeps full precision near x = m0.
  const double one_minus_a2 = (x - m0) * (x + m0) / (x * x);
  const double b = 0.5 * (d - 1);
  const double tail = boost::math::ibeta(b, 0.5, one_minus_a2);
  const double tail2 = boost::math::ibeta(b, 1.5, one_minus_a2) / d;
  return {2.0 * tail - 1.0, 2.0 * tail2 - 1.0 / d};
}

AsymptoticConstants c_constants(int d, const WeightSpec& w2, const RadialLaw& law) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  validate(w2);
  AsymptoticConstants c;
  c.d = d;
  c.w2 = w2;
  c.law = law;
  c.m0 = radial_m0(law);
  c.pm0 = law.pdf(c.m0);
  const double m0 = c.m0;
  const auto cuts = c.breakpoints();
  const auto s0 = [m0](double r) { return 1.0 / (1.0 + r / m0); };
  c.c0 = expect_radial([&](double r) { return weight_eval(w2, s0(r)); }, d, law, cuts);
  if (!(c.c0 > 0.0)) throw DegenerateWeightsError("c0 vanishes: the weight support misses the depth mass");
  c.c1 = expect_radial([&](double r) { return r * r * weight_eval(w2, s0(r)); }, d, law, cuts) / (d * c.c0);
  const double denom = 4.0 * m0 * m0 * c.pm0;
  c.c2 = expect_radial([&](double r) { const double s = s0(r); return r * s * s * weight_deriv(w2, s); }, d, law,
                       cuts) / denom;
  c.c3 = expect_radial([&](double r) { const double s = s0(r); return r * r * r * s * s * weight_deriv(w2, s); },
                       d, law, cuts) / denom;
  return c;
}

TPair t_funcs(double r, const AsymptoticConstants& c) {
  if (!(r >= 0.0)) throw DomainError("t functions need r >= 0");
  const SMoments s = s_moments(r, c.d, c.m0);
  const double q = c.d > 1 ? (s.s1 - s.s2) / (c.d - 1) : 0.0;
  const double w = weight_eval(c.w2, s0_eval(r, c.m0));
  const double tail = std::isinf(r) ? 0.0 : r * r * w;
  return {c.c3 * (s.s2 - q) + tail, c.c3 * q - c.c1 * c.c2 * s.s1 - c.c1 * w};
}

SigmaPair sigma_pair(const AsymptoticConstants& c) {
  const auto cuts = c.breakpoints();
  const double d = c.d;
  const double e11 = expect_radial([&](double r) { const double t = t_funcs(r, c).t1; return t * t; }, c.d, c.law, cuts);
  const double e12 = expect_radial([&](double r) { const auto t = t_funcs(r, c); return t.t1 * t.t2; }, c.d, c.law, cuts);
  const double e22 = expect_radial([&](double r) { const double t = t_funcs(r, c).t2; return t * t; }, c.d, c.law, cuts);
  const double c02 = c.c0 * c.c0;
  const double sigma1 = e11 / (d * (d + 2.0) * c02);
  const double sigma2 = sigma1 + 2.0 * e12 / (d * c02) + e22 / c02;
  if (!(sigma1 > 0.0)) throw NumericError("sigma1 is not positive");
  return {sigma1, sigma2};
}

AsymptoticConstants asymptotic_constants(int d, const WeightSpec& w2, const RadialLaw& law) {
  AsymptoticConstants c = c_constants(d, w2, law);
  const SigmaPair s = sigma_pair(c);
  c.sigma1 = s.sigma1;
  c.sigma2 = s.sigma2;
  return c;
}

double centering_residual(const AsymptoticConstants& c) {
  const auto cuts = c.breakpoints();
  const double e1 = expect_radial([&](double r) { return t_funcs(r, c).t1; }, c.d, c.law, cuts);
  const double e2 = expect_radial([&](double r) { return t_funcs(r, c).t2; }, c.d, c.law, cuts);
  return e1 / c.d + e2;
}

double are_shape(const AsymptoticConstants& c, double kappa) {
  if (!(kappa >= -1.0)) throw DomainError("kappa must be at least -1");
  return c.c1 * c.c1 * (1.0 + kappa) / c.sigma1;
}

double are_shape(int d, const WeightSpec& w2, double kappa, const RadialLaw& law) {
  return are_shape(asymptotic_constants(d, w2, law), kappa);
}

double sup_over_radius(const std::function<double(double)>& f, const AsymptoticConstants& c) {
  const double r_max = c.law.radius_quantile(1.0 - 1e-10, c.d);
  const double step = r_max / (kSupGrid - 1);
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kSupGrid; ++i) {
    const double v = f(i * step);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double lo = std::max(0, best - 1) * step;
  const double hi = std::min(kSupGrid - 1, best + 1) * step;
  return std::max(best_v, f(golden_max(f, lo, hi, 1e-12)));
}

double g2_index(const AsymptoticConstants& c) {
  return sup_over_radius([&](double r) { return t_funcs(r, c).t1; }, c) / (c.c0 * (c.d + 2.0));
}

double g2_index(int d, const WeightSpec& w2, const RadialLaw& law) { return g2_index(c_constants(d, w2, law)); }

Eigen::MatrixXd if_pws(const Eigen::VectorXd& x, const EllipticalModel& model, const AsymptoticConstants& c) {
  if (model.dim != c.d) throw DomainError("model and constants dimensions differ");
  const Eigen::VectorXd z = model.standardize(x);
  const double r = z.norm();
  const TPair t = t_funcs(r, c);
  Eigen::MatrixXd m = t.t2 * Eigen::MatrixXd::Identity(c.d, c.d);
  if (r > 0.0) m += t.t1 * z * z.transpose() / (r * r);
  m /= c.c0;
  return model.sigma_half * m * model.sigma_half;
}

double if_pd(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const EllipticalModel& model) {
  const Eigen::VectorXd ys = model.standardize(y);
  const Eigen::VectorXd xs = model.standardize(x);
  const double ny = ys.norm();
  if (ny == 0.0) throw DomainError("the outlyingness direction is not unique at the center");
  const double a = ys.dot(xs);
  const double s0 = s0_eval(ny, model.m0);
  const double mad_term = ny * sign(std::fabs(a) - model.m0 * ny) / (4.0 * model.m0 * model.pm0);
  const double med_term = sign(a) / (2.0 * model.p0);
  return s0 * s0 / model.m0 * (mad_term + med_term);
}

Eigen::MatrixXd commutation_matrix(int d) {
  if (d < 1) throw DomainError("dimension must be at least 1");
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) k(i + j * d, j + i * d) = 1.0;
  }
  return k;
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Eigen::MatrixXd v_matrix(const AsymptoticConstants& c, const Eigen::MatrixXd& sigma) {
  const int d = static_cast<int>(sigma.rows());
  if (sigma.cols() != d || d != c.d) throw DomainError("scatter dimension does not match the constants");
  Eigen::MatrixXd kron(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) kron.block(i * d, j * d, d, d) = sigma(i, j) * sigma;
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d * d, d * d);
  const Eigen::VectorXd v = vec(sigma);
  Eigen::MatrixXd out = c.sigma1 * (id + commutation_matrix(d)) * kron + c.sigma2 * v * v.transpose();
  return 0.5 * (out + out.transpose());
}

LrtLimit lrt_limit_scale(const AsymptoticConstants& c) {
  return {c.sigma1 / (c.c1 * c.c1), (c.d - 1) * (c.d + 2) / 2};
}

}  // namespace pdscatter
