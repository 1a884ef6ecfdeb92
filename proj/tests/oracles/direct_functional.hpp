#pragma once

// Independent evaluation of the depth-weighted location/scatter functional at
// (1 - eps) N(0, I_2) + eps delta_y. Shares no code with the library: normal
// cdf from erfc, own root finder, own weight formula, own quadrature nodes.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  while (f(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Quadratic-base weight of order i: (exp(-K g) - exp(-K)) / (1 - exp(-K)),
// g = (1 - (r/C)^2)^{2i}.
inline double weight(int order, double cutoff, double steepness, double r) {
  if (r >= cutoff) return 1.0;
  const double q = (r / cutoff) * (r / cutoff);
  const double g = std::pow(1.0 - q, 2 * order);
  return (std::exp(-steepness * g) - std::exp(-steepness)) / (1.0 - std::exp(-steepness));
}

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Rule legendre(int n, double a, double b) {
  Rule r;
  for (int i = 1; i <= n; ++i) {
    double x = std::cos(std::numbers::pi * (i - 0.25) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    r.nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * x);
    r.weights.push_back((b - a) / ((1.0 - x * x) * dp * dp));
  }
  return r;
}

// Contaminated Med and MAD of (1 - eps) N(0, 1) + eps delta_t, tabulated in
// the median c so repeated direction scans stay cheap.
class ContaminatedScale {
 public:
  explicit ContaminatedScale(double eps) : eps_(eps) {
    const double target = 1.0 / (2.0 * (1.0 - eps));
    d1_ = bisect([&](double y) { return norm_cdf(y) - target; }, 0.0, 1.0);
    const int n = 4001;
    for (int i = 0; i < n; ++i) {
      const double c = d1_ * i / (n - 1);
      c_.push_back(c);
      m1_.push_back(solve_m(c, (1.0 - 2.0 * eps) / (2.0 * (1.0 - eps))));
      m2_.push_back(solve_m(c, target));
    }
  }

  void at(double t, double& med, double& mad) const {
    med = std::clamp(t, -d1_, d1_);
    const double a = interp(m1_, std::fabs(med));
    const double b = interp(m2_, std::fabs(med));
    const double dev = std::fabs(t - med);
    mad = std::max(std::min(a, b), std::min(std::max(a, b), dev));
  }

 private:
  double solve_m(double c, double target) const {
    return bisect([&](double m) { return norm_cdf(c + m) - norm_cdf(c - m) - target; }, 0.0, 1.0);
  }
  double interp(const std::vector<double>& v, double c) const {
    if (d1_ == 0.0) return v[0];
    const double pos = c / d1_ * static_cast<double>(c_.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), c_.size() - 4);
    const std::size_t j = i == 0 ? 0 : i - 1;
    // Cubic Lagrange through j..j+3.
    double out = 0.0;
    for (std::size_t a = j; a < j + 4; ++a) {
      double term = v[a];
      for (std::size_t b = j; b < j + 4; ++b) {
        if (b != a) term *= (pos - static_cast<double>(b)) / (static_cast<double>(a) - static_cast<double>(b));
      }
      out += term;
    }
    return out;
  }

  double eps_;
  double d1_;
  std::vector<double> c_;
  std::vector<double> m1_;
  std::vector<double> m2_;
};

// sup over directions of |u'x - med(u)| / mad(u) at the contaminated law.
class ContaminatedOutlyingness {
 public:
  ContaminatedOutlyingness(const ContaminatedScale& scale, Eigen::Vector2d y, int grid)
      : scale_(scale), y_(y) {
    for (int i = 0; i < grid; ++i) {
      const double a = std::numbers::pi * i / grid;
      angle_.push_back(a);
      double med = 0.0;
      double mad = 0.0;
      scale_.at(std::cos(a) * y_(0) + std::sin(a) * y_(1), med, mad);
      med_.push_back(med);
      mad_.push_back(mad);
    }
  }

  double operator()(const Eigen::Vector2d& x) const {
    const auto n = angle_.size();
    std::size_t best = 0;
    double best_v = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::fabs(std::cos(angle_[i]) * x(0) + std::sin(angle_[i]) * x(1) - med_[i]) / mad_[i];
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    const double h = std::numbers::pi / static_cast<double>(n);
    double lo = angle_[best] - h;
    double hi = angle_[best] + h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - g * (hi - lo);
    double b = lo + g * (hi - lo);
    double fa = ratio(x, a);
    double fb = ratio(x, b);
    for (int it = 0; it < 60; ++it) {
      if (fa < fb) {
        lo = a;
        a = b;
        fa = fb;
        b = lo + g * (hi - lo);
        fb = ratio(x, b);
      } else {
        hi = b;
        b = a;
        fb = fa;
        a = hi - g * (hi - lo);
        fa = ratio(x, a);
      }
    }
    return std::max({best_v, fa, fb});
  }

 private:
  double ratio(const Eigen::Vector2d& x, double a) const {
    double med = 0.0;
    double mad = 0.0;
    scale_.at(std::cos(a) * y_(0) + std::sin(a) * y_(1), med, mad);
    return std::fabs(std::cos(a) * x(0) + std::sin(a) * x(1) - med) / mad;
  }

  const ContaminatedScale& scale_;
  Eigen::Vector2d y_;
  std::vector<double> angle_;
  std::vector<double> med_;
  std::vector<double> mad_;
};

struct FunctionalOptions {
  double cutoff = 0.3229;
  double steepness = 2.0;
  int direction_grid = 1024;
  int radial_per_panel = 12;
  int angular = 256;
};

// Scatter of the depth-weighted functional at (1 - eps) N(0, I_2) + eps delta_y.
inline Eigen::Matrix2d contaminated_scatter(const Eigen::Vector2d& y, double eps, const FunctionalOptions& o = {}) {
  const ContaminatedScale scale(eps);
  const ContaminatedOutlyingness out(scale, y, o.direction_grid);
  auto w1 = [&](double depth) { return weight(1, o.cutoff, o.steepness, depth); };
  auto w2 = [&](double depth) { return weight(2, o.cutoff, o.steepness, depth); };

  // Polar rule: x = R (cos a, sin a), R with the chi_2 density R exp(-R^2/2),
  // composite Gauss-Legendre on radial panels, trapezoid in angle.
  const std::vector<double> cuts{0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 8.5};
  struct Node {
    Eigen::Vector2d x;
    double weight;
  };
  std::vector<Node> nodes;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const Rule r = legendre(o.radial_per_panel, cuts[p], cuts[p + 1]);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double rad = r.nodes[i];
      const double dens = rad * std::exp(-0.5 * rad * rad);
      for (int j = 0; j < o.angular; ++j) {
        const double a = 2.0 * std::numbers::pi * (j + 0.5) / o.angular;
        nodes.push_back({Eigen::Vector2d(rad * std::cos(a), rad * std::sin(a)), r.weights[i] * dens / o.angular});
      }
    }
  }
  std::vector<double> depth(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) depth[i] = 1.0 / (1.0 + out(nodes[i].x));
  const double depth_y = 1.0 / (1.0 + out(y));

  double s1 = eps * w1(depth_y);
  Eigen::Vector2d l1 = eps * w1(depth_y) * y;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = (1.0 - eps) * nodes[i].weight * w1(depth[i]);
    s1 += w;
    l1 += w * nodes[i].x;
  }
  const Eigen::Vector2d loc = l1 / s1;

  double s2 = eps * w2(depth_y);
  Eigen::Matrix2d acc = eps * w2(depth_y) * (y - loc) * (y - loc).transpose();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = (1.0 - eps) * nodes[i].weight * w2(depth[i]);
    s2 += w;
    const Eigen::Vector2d c = nodes[i].x - loc;
    acc += w * c * c.transpose();
  }
  return acc / s2;
}

}  // namespace oracle
