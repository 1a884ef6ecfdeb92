#include "pdscatter/maxbias.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <tuple>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "pdscatter/errors.hpp"
#include "pdscatter/parallel.hpp"
#include "pdscatter/quadrature.hpp"

namespace pdscatter {

namespace {

constexpr int kRefGrid = 2049;
constexpr int kTableNodes = 96;
constexpr int kLocalGrid = 8;
constexpr double kGoldenTol = 1e-11;

void check_u_r(double u1, double r) {
  if (!(u1 >= 0.0) || !(u1 <= 1.0)) throw DomainError("u1 must lie in [0, 1]");
  if (!(r >= 0.0)) throw DomainError("r must be nonnegative");
}

// Maximum of f on [lo, hi]: grid of kLocalGrid cells, then golden-section in
// the best bracket.
template <class F>
double grid_golden_max(F&& f, double lo, double hi) {
  if (!(hi > lo)) return f(lo);
  const double step = (hi - lo) / kLocalGrid;
  int best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kLocalGrid; ++i) {
    const double v = f(lo + i * step);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(kLocalGrid, best + 1) * step;
  const std::function<double(double)> fn = f;
  return std::max(best_v, f(golden_max(fn, a, b, kGoldenTol)));
}

double clamp3(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

GeometryValue geometry(double u1, double r, double eps, const RadialLaw& law) {
  check_u_r(u1, r);
  const double d1 = solve_d1(law, eps);
  const double t = u1 * r;
  const double f4 = median_of_three(-d1, t, d1);
  const double m1 = solve_m(law, f4, eps, HalfWidth::Lower);
  const double m2 = solve_m(law, f4, eps, HalfWidth::Upper);
  return {f4, median_of_three(m1, std::fabs(t - f4), m2)};
}

namespace {

template <class F>
double reference_sup(F&& ratio) {
  std::vector<double> values(kRefGrid);
  const double step = 1.0 / (kRefGrid - 1);
  for (int i = 0; i < kRefGrid; ++i) values[i] = ratio(i * step);
  std::vector<int> order(kRefGrid);
  for (int i = 0; i < kRefGrid; ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + 3, order.end(),
                    [&](int a, int b) { return values[a] > values[b]; });
  double best = values[order[0]];
  const std::function<double(double)> fn = ratio;
  for (int t = 0; t < 3; ++t) {
    const int i = order[t];
    const double lo = std::max(0, i - 1) * step;
    const double hi = std::min(kRefGrid - 1, i + 1) * step;
    best = std::max(best, ratio(golden_max(fn, lo, hi, 1e-13)));
  }
  return best;
}

}  // namespace

double f1_sup(double x1, double x2norm, double r, double eps, const RadialLaw& law) {
  if (!(x2norm >= 0.0)) throw DomainError("||x2|| must be nonnegative");
  check_u_r(0.0, r);
  return reference_sup([&](double u) {
    const GeometryValue g = geometry(u, r, eps, law);
    return (std::sqrt(std::max(0.0, 1.0 - u * u)) * x2norm + std::fabs(u * x1 - g.f4)) / g.f3;
  });
}

double f2_sup(double r, double eps, const RadialLaw& law) {
  check_u_r(0.0, r);
  return reference_sup([&](double u) {
    const GeometryValue g = geometry(u, r, eps, law);
    return std::fabs(u * r - g.f4) / g.f3;
  });
}

ContaminationGeometry::ContaminationGeometry(double eps, const RadialLaw& law, int dim) : eps_(eps), dim_(dim) {
  d1_ = solve_d1(law, eps);
  big_m1_ = solve_m(law, d1_, eps, HalfWidth::Lower);
  big_m2_ = solve_m(law, d1_, eps, HalfWidth::Upper);
  const int nodes = d1_ > 0.0 ? kTableNodes : 1;
  table_m_.resize(nodes + 1);
  table_dm_.resize(nodes + 1);
  table_step_ = d1_ / nodes;
  for (int j = 0; j <= nodes; ++j) {
    const double c = j * table_step_;
    const double m = solve_m(law, c, eps, HalfWidth::Lower);
    // Implicit differentiation of P(|Y - c| <= m) = const.
    const double pp = law.pdf(c + m);
    const double pm = law.pdf(c - m);
    table_m_[j] = m;
    table_dm_[j] = -(pp - pm) / (pp + pm);
  }
}

double ContaminationGeometry::m1_at(double c) const {
  if (table_step_ == 0.0) return table_m_[0];
  const int last = static_cast<int>(table_m_.size()) - 1;
  const double pos = std::clamp(c / table_step_, 0.0, static_cast<double>(last));
  const int j = std::min(static_cast<int>(pos), last - 1);
  const double t = pos - j;
  const double h = table_step_;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * table_m_[j] + (t3 - 2 * t2 + t) * h * table_dm_[j] +
         (-2 * t3 + 3 * t2) * table_m_[j + 1] + (t3 - t2) * h * table_dm_[j + 1];
}

double ContaminationGeometry::region_a(double a, double b, double r, double u_end) const {
  // f4 = u r, f3 = m1(u r).
  const double slope = std::fabs(b - r);
  return grid_golden_max(
      [&](double u) { return (std::sqrt(std::max(0.0, 1.0 - u * u)) * a + u * slope) / m1_at(u * r); }, 0.0,
      u_end);
}

double ContaminationGeometry::region_b(double a, double b, double r, double u_start) const {
  // f4 = d1, f3 = clamp(u r - d1, M1, M2).
  std::vector<double> cuts{u_start, 1.0, (d1_ + big_m1_) / r, (d1_ + big_m2_) / r};
  if (b > 0.0) cuts.push_back(d1_ / b);
  std::sort(cuts.begin(), cuts.end());
  const auto numerator = [&](double u) { return std::sqrt(std::max(0.0, 1.0 - u * u)) * a + std::fabs(u * b - d1_); };
  const auto f3 = [&](double u) { return clamp3(u * r - d1_, big_m1_, big_m2_); };
  double best = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = std::max(cuts[i], u_start);
    const double hi = std::min(cuts[i + 1], 1.0);
    if (!(hi > lo)) continue;
    best = std::max({best, numerator(lo) / f3(lo), numerator(hi) / f3(hi)});
    const double mid = 0.5 * (lo + hi);
    const double span = mid * r - d1_;
    if (span <= big_m1_ || span >= big_m2_) {
      // Constant f3: the numerator is concave on the piece.
      const double s = mid * b - d1_ >= 0.0 ? 1.0 : -1.0;
      const double sb = s * b;
      double u_star = 0.0;
      if (sb > 0.0) u_star = sb / std::hypot(a, b);
      u_star = std::clamp(u_star, lo, hi);
      best = std::max(best, numerator(u_star) / f3(u_star));
    } else {
      // Concave over positive linear: quasiconcave.
      const std::function<double(double)> ratio = [&](double u) { return numerator(u) / f3(u); };
      best = std::max(best, ratio(golden_max(ratio, lo, hi, kGoldenTol)));
    }
  }
  return best;
}

double ContaminationGeometry::f1(double x1, double x2norm, double r) const {
  if (dim_ == 1) {
    if (r <= d1_) return std::fabs(x1 - r) / m1_at(r);
    return std::fabs(x1 - d1_) / clamp3(r - d1_, big_m1_, big_m2_);
  }
  const double u_split = r > 0.0 ? std::min(1.0, d1_ / r) : 1.0;
  double best = u_split > 0.0 ? region_a(x2norm, x1, r, u_split) : x2norm / m1_at(0.0);
  if (u_split < 1.0) best = std::max(best, region_b(x2norm, x1, r, u_split));
  return best;
}

double ContaminationGeometry::f2(double r) const {
  if (!(r > d1_)) return 0.0;
  return (r - d1_) / clamp3(r - d1_, big_m1_, big_m2_);
}

MaxBiasEngine::MaxBiasEngine(int d, WeightSpec w1, WeightSpec w2, RadialLaw law, MomentRule rule)
    : d_(d), w1_(w1), w2_(w2), law_(std::move(law)) {
  validate(w1_);
  validate(w2_);
  if (rule.radial < 4 || rule.angular < 2) throw DomainError("moment rule is too small");
  consts_ = asymptotic_constants(d, w2_, law_);
  const double r_top = law_.radius_quantile(1.0 - 1e-13, d);
  const double r_kink = std::min(consts_.m0 * (1.0 / w2_.cutoff - 1.0), 0.5 * r_top);
  const int inner = rule.radial / 2;
  for (auto [lo, hi, n] : {std::tuple{0.0, r_kink, inner}, std::tuple{r_kink, r_top, rule.radial - inner}}) {
    const GaussLegendreRule gl = gauss_legendre(n, lo, hi);
    for (int i = 0; i < n; ++i) {
      r_nodes_.push_back(gl.nodes[i]);
      r_weights_.push_back(gl.weights[i] * law_.radius_pdf(gl.nodes[i], d));
    }
  }
  angular_ = rule.angular;
}

void MaxBiasEngine::build_angular_rule(double d1) {
  cos_nodes_.clear();
  sin_nodes_.clear();
  a_weights_.clear();
  if (d_ == 1) {
    cos_nodes_ = {1.0, -1.0};
    sin_nodes_ = {0.0, 0.0};
    a_weights_ = {0.5, 0.5};
    return;
  }
  const double norm = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * (d_ - 1)) - std::lgamma(0.5 * d_));
  const double half_pi = 0.5 * std::numbers::pi;
  // Directions nearly orthogonal to the contamination see a median shift of
  // order d1 inside a band of width O(sqrt(d1)) around phi = pi/2.
  const double band = std::min(0.25 * std::numbers::pi, 8.0 * std::sqrt(d1));
  std::vector<std::tuple<double, double, int>> panels;
  if (band > 0.0) {
    const int centre = angular_ / 2;
    const int side = (angular_ - centre) / 2;
    panels = {{0.0, half_pi - band, side},
              {half_pi - band, half_pi + band, centre},
              {half_pi + band, std::numbers::pi, angular_ - centre - side}};
  } else {
    panels = {{0.0, std::numbers::pi, angular_}};
  }
  for (auto [lo, hi, n] : panels) {
    const GaussLegendreRule gl = gauss_legendre(n, lo, hi);
    for (int j = 0; j < n; ++j) {
      const double s = std::sin(gl.nodes[j]);
      cos_nodes_.push_back(std::cos(gl.nodes[j]));
      sin_nodes_.push_back(s);
      a_weights_.push_back(gl.weights[j] * std::pow(s, d_ - 2) / norm);
    }
  }
}

const ContaminationGeometry& MaxBiasEngine::geometry_for(double eps) {
  if (!cached_ || cached_->eps() != eps) {
    cached_.emplace(eps, law_, d_);
    build_angular_rule(cached_->d1());
  }
  return *cached_;
}

ContaminationMoments MaxBiasEngine::moments(double r, double eps) {
  if (!(r >= 0.0)) throw DomainError("r must be nonnegative");
  const ContaminationGeometry& geo = geometry_for(eps);
  const std::size_t nr = r_nodes_.size();
  std::vector<std::array<double, 6>> partial(nr);
  parallel_for(nr, [&](std::size_t i) {
    const double radius = r_nodes_[i];
    std::array<double, 6> acc{};
    for (std::size_t j = 0; j < cos_nodes_.size(); ++j) {
      const double x1 = radius * cos_nodes_[j];
      const double x2 = radius * sin_nodes_[j];
      const double s = 1.0 / (1.0 + geo.f1(x1, x2, r));
      const double v1 = weight_eval(w1_, s);
      const double v2 = weight_eval(w2_, s);
      const double w = a_weights_[j];
      acc[0] += w * x1 * v1;
      acc[1] += w * x1 * v2;
      acc[2] += w * x1 * x1 * v2;
      acc[3] += w * x2 * x2 * v2;
      acc[4] += w * v1;
      acc[5] += w * v2;
    }
    for (double& a : acc) a *= r_weights_[i];
    partial[i] = acc;
  });
  std::array<double, 6> total{};
  for (const auto& p : partial) {
    for (int k = 0; k < 6; ++k) total[k] += p[k];
  }
  const double keep = 1.0 - eps;
  ContaminationMoments m;
  m.phi1 = keep * total[0];
  m.phi2 = keep * total[1];
  m.psi1 = keep * total[2];
  m.psi2 = d_ > 1 ? keep * total[3] / (d_ - 1) : 0.0;
  m.eta1 = keep * total[4];
  m.eta2 = keep * total[5];
  const double s_y = 1.0 / (1.0 + geo.f2(r));
  m.gamma1 = eps * weight_eval(w1_, s_y);
  m.gamma2 = eps * weight_eval(w2_, s_y);
  return m;
}

BiasCoeffs bias_from_moments(const ContaminationMoments& m, double r, double c1) {
  const double den1 = m.eta1 + m.gamma1;
  const double den2 = m.eta2 + m.gamma2;
  if (!(den1 > 0.0) || !(den2 > 0.0)) throw DegenerateWeightsError("contaminated weight mass vanishes");
  const double l1 = (m.phi1 + m.gamma1 * r) / den1;
  const double l2 = (m.phi2 + m.gamma2 * r) / den2;
  const double b1 = (m.psi1 - m.psi2 + m.gamma2 * r * r) / den2 + l1 * l1 - 2.0 * l1 * l2;
  const double b2 = m.psi2 / den2 - c1;
  return {b1, b2};
}

BiasCoeffs MaxBiasEngine::coeffs(double r, double eps) {
  return bias_from_moments(moments(r, eps), r, consts_.c1);
}

double MaxBiasEngine::r_max(double eps) {
  const ContaminationGeometry& geo = geometry_for(eps);
  return 10.0 * (geo.d1() + geo.big_m2() + consts_.m0) / w2_.cutoff;
}

double MaxBiasEngine::sup_b1(double eps, int grid) {
  if (grid < 3) throw DomainError("r grid needs at least 3 points");
  if (eps == 0.0) return 0.0;
  const double lo = std::log(1e-3 * consts_.m0);
  const double hi = std::log(r_max(eps));
  const double step = (hi - lo) / (grid - 1);
  std::vector<double> values(grid);
  for (int i = 0; i < grid; ++i) values[i] = coeffs(std::exp(lo + i * step), eps).b1;
  const int best = static_cast<int>(std::max_element(values.begin(), values.end()) - values.begin());
  const std::function<double(double)> f = [&](double t) { return coeffs(std::exp(t), eps).b1; };
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(grid - 1, best + 1) * step;
  return std::max(values[best], f(golden_max(f, a, b, 1e-6)));
}

ContaminationMoments contamination_moments(double r, double eps, int d, const WeightSpec& w1, const WeightSpec& w2,
                                           const RadialLaw& law, MomentRule rule) {
  MaxBiasEngine engine(d, w1, w2, law, rule);
  return engine.moments(r, eps);
}

BiasCoeffs bias_coeffs(double r, double eps, int d, const WeightSpec& w1, const WeightSpec& w2,
                       const RadialLaw& law, MomentRule rule) {
  MaxBiasEngine engine(d, w1, w2, law, rule);
  return engine.coeffs(r, eps);
}

Eigen::MatrixXd contaminated_pws(const Eigen::VectorXd& y, double eps, const EllipticalModel& model,
                                 MaxBiasEngine& engine) {
  if (model.dim != engine.dim()) throw DomainError("model and engine dimensions differ");
  const Eigen::VectorXd yt = model.standardize(y);
  const double r = yt.norm();
  const BiasCoeffs b = engine.coeffs(r, eps);
  const int d = model.dim;
  Eigen::MatrixXd inner = (engine.constants().c1 + b.b2) * Eigen::MatrixXd::Identity(d, d);
  if (r > 0.0) inner += b.b1 * yt * yt.transpose() / (r * r);
  return model.sigma_half * inner * model.sigma_half;
}

Eigen::MatrixXd contaminated_pws(const Eigen::VectorXd& y, double eps, const EllipticalModel& model,
                                 const WeightSpec& w1, const WeightSpec& w2, MomentRule rule) {
  MaxBiasEngine engine(model.dim, w1, w2, model.law, rule);
  return contaminated_pws(y, eps, model, engine);
}

double mbi(double eps, const EllipticalModel& model, MaxBiasEngine& engine, int grid) {
  if (model.dim != engine.dim()) throw DomainError("model and engine dimensions differ");
  return model.lambda1 * engine.sup_b1(eps, grid);
}

double mbi(double eps, const EllipticalModel& model, const WeightSpec& w1, const WeightSpec& w2, int grid,
           MomentRule rule) {
  MaxBiasEngine engine(model.dim, w1, w2, model.law, rule);
  return mbi(eps, model, engine, grid);
}

double csi_gesi(const EllipticalModel& model, const AsymptoticConstants& consts) {
  if (model.dim != consts.d) throw DomainError("model and constants dimensions differ");
  const double sup = sup_over_radius([&](double r) { return std::fabs(t_funcs(r, consts).t1); }, consts);
  return model.lambda1 * sup / consts.c0;
}

double mad_maxbias(double eps, const RadialLaw& law) {
  const double d1 = solve_d1(law, eps);
  return solve_m(law, d1, eps, HalfWidth::Upper) - radial_m0(law);
}

namespace {

void check_eps_grid(const std::vector<double>& eps_grid) {
  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] >= 0.0) || !(eps_grid[i] < 0.5)) {
      throw ContaminationError("contamination fractions must lie in [0, 1/2)");
    }
    if (i > 0 && !(eps_grid[i] > eps_grid[i - 1])) throw DomainError("eps grid must be strictly increasing");
  }
}

}  // namespace

BiasCurve mbi_curve(const std::vector<double>& eps_grid, const EllipticalModel& model, MaxBiasEngine& engine,
                    int grid) {
  check_eps_grid(eps_grid);
  BiasCurve curve;
  curve.kind = BiasKind::MBI;
  std::ostringstream summary;
  summary << model.law.name << " d=" << model.dim << " lambda1=" << model.lambda1;
  curve.model_summary = summary.str();
  for (double eps : eps_grid) curve.points.emplace_back(eps, eps == 0.0 ? 0.0 : std::max(0.0, mbi(eps, model, engine, grid)));
  return curve;
}

BiasCurve mad_bias_curve(const std::vector<double>& eps_grid, const RadialLaw& law) {
  check_eps_grid(eps_grid);
  BiasCurve curve;
  curve.kind = BiasKind::MADBias;
  curve.model_summary = law.name;
  for (double eps : eps_grid) curve.points.emplace_back(eps, mad_maxbias(eps, law));
  return curve;
}

}  // namespace pdscatter
