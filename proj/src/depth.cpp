#include "pdscatter/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "pdscatter/errors.hpp"
#include "pdscatter/parallel.hpp"
#include "pdscatter/quadrature.hpp"

namespace pdscatter {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kRefineCandidates = 3;
constexpr int kArcSamples = 16;

struct DirStat {
  double angle = 0.0;  // used only in d = 2
  Eigen::VectorXd u;
  double med = 0.0;
  double mad = 0.0;
};

class Projector {
 public:
  Projector(const DataMatrix& data, int k) : data_(data), k_(k), proj_(data.n()) {
    if (k < 1 || k > data.n()) throw DomainError("MAD_k needs 1 <= k <= n");
  }

  DirStat stats(const Eigen::VectorXd& u, double angle = 0.0) {
    const auto& rows = data_.rows();
    const int n = data_.n();
    for (int i = 0; i < n; ++i) proj_[i] = rows.row(i).dot(u);
    const double med = med_k_inplace(proj_, 1);
    for (double& v : proj_) v = std::fabs(v - med);
    const double mad = med_k_inplace(proj_, k_);
    return {angle, u, med, mad};
  }

  double ratio_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    const DirStat s = stats(u);
    return ratio(x.dot(u), s);
  }

  static double ratio(double ux, const DirStat& s) {
    const double num = std::fabs(ux - s.med);
    if (s.mad > 0.0) return num / s.mad;
    return num > 0.0 ? kInf : 0.0;
  }

 private:
  const DataMatrix& data_;
  int k_;
  std::vector<double> proj_;
};

Eigen::VectorXd unit_at(double angle) {
  Eigen::VectorXd u(2);
  u << std::cos(angle), std::sin(angle);
  return u;
}

bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

// Orients u so that the numerator u'x - Med is nonnegative.
Eigen::VectorXd oriented(const Eigen::VectorXd& x, const DirStat& s) {
  const double num = x.dot(s.u) - s.med;
  if (num < 0.0) return -s.u;
  if (num > 0.0) return s.u;
  for (Eigen::Index i = 0; i < s.u.size(); ++i) {
    if (s.u[i] != 0.0) return s.u[i] > 0.0 ? s.u : Eigen::VectorXd(-s.u);
  }
  return s.u;
}

struct Best {
  double value = -1.0;
  Eigen::VectorXd direction;

  void offer(double value_in, const Eigen::VectorXd& dir) {
    if (value_in > value || (value_in == value && lex_less(dir, direction))) {
      value = value_in;
      direction = dir;
    }
  }
};

void check_point(const Eigen::VectorXd& x, const DataMatrix& data) {
  if (x.size() != data.d()) throw DomainError("point dimension does not match the data");
  if (!x.allFinite()) throw DomainError("point entries must be finite");
}

// Candidate directions normal to x_i - x_j, sorted by angle in [0, pi).
std::vector<DirStat> pair_normal_stats(const DataMatrix& data, Projector& projector) {
  const auto& rows = data.rows();
  const int n = data.n();
  std::vector<double> angles;
  angles.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double a = rows(j, 0) - rows(i, 0);
      const double b = rows(j, 1) - rows(i, 1);
      if (a == 0.0 && b == 0.0) continue;
      double angle = std::atan2(a, -b);
      if (angle < 0.0) angle += std::numbers::pi;
      if (angle >= std::numbers::pi) angle -= std::numbers::pi;
      angles.push_back(angle);
    }
  }
  std::sort(angles.begin(), angles.end());
  angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
  std::vector<DirStat> out;
  out.reserve(angles.size());
  for (double angle : angles) out.push_back(projector.stats(unit_at(angle), angle));
  return out;
}

DirStat normal_stat(const Eigen::VectorXd& diff, Projector& projector) {
  double angle = std::atan2(diff[0], -diff[1]);
  if (angle < 0.0) angle += std::numbers::pi;
  if (angle >= std::numbers::pi) angle -= std::numbers::pi;
  return projector.stats(unit_at(angle), angle);
}

// Golden-section refinement in the arcs adjacent to the best candidates.
void refine_2d(const Eigen::VectorXd& x, const std::vector<DirStat>& sorted, Projector& projector,
               Best& best) {
  const std::size_t m = sorted.size();
  if (m == 0 || std::isinf(best.value)) return;
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  const std::size_t top = std::min<std::size_t>(kRefineCandidates, m);
  std::vector<double> values(m);
  for (std::size_t i = 0; i < m; ++i) values[i] = Projector::ratio(x.dot(sorted[i].u), sorted[i]);
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  const auto f = [&](double angle) {
    const double v = projector.ratio_at(x, unit_at(angle));
    return std::isinf(v) ? std::numeric_limits<double>::max() : v;
  };
  const auto offer_angle = [&](double angle) {
    const DirStat s = projector.stats(unit_at(angle), angle);
    best.offer(Projector::ratio(x.dot(s.u), s), oriented(x, s));
  };
  for (std::size_t t = 0; t < top; ++t) {
    const std::size_t c = order[t];
    const double here = sorted[c].angle;
    const double prev = c > 0 ? sorted[c - 1].angle : sorted[m - 1].angle - std::numbers::pi;
    const double next = c + 1 < m ? sorted[c + 1].angle : sorted[0].angle + std::numbers::pi;
    for (auto [lo, hi] : {std::pair{prev, here}, std::pair{here, next}}) {
      if (!(hi > lo)) continue;
      const double step = (hi - lo) / (kArcSamples + 1);
      int best_s = 0;
      double best_v = -1.0;
      for (int s = 0; s <= kArcSamples + 1; ++s) {
        const double v = f(lo + s * step);
        if (v > best_v) {
          best_v = v;
          best_s = s;
        }
      }
      const double a = lo + std::max(0, best_s - 1) * step;
      const double b = lo + std::min(kArcSamples + 1, best_s + 1) * step;
      offer_angle(golden_max(f, a, b, 1e-13));
    }
  }
}

OutlyingnessResult finish(const Best& best) { return {std::max(0.0, best.value), best.direction}; }

OutlyingnessResult outlyingness_2d(const Eigen::VectorXd& x, const DataMatrix& data,
                                   Projector& projector, const std::vector<DirStat>& shared,
                                   bool add_point_normals, bool refine) {
  Best best;
  for (const auto& s : shared) best.offer(Projector::ratio(x.dot(s.u), s), oriented(x, s));
  if (!add_point_normals) {
    if (refine) refine_2d(x, shared, projector, best);
    return finish(best);
  }
  std::vector<DirStat> all = shared;
  for (int i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd diff = x - data.row(i);
    if (diff.squaredNorm() == 0.0) continue;
    DirStat s = normal_stat(diff, projector);
    best.offer(Projector::ratio(x.dot(s.u), s), oriented(x, s));
    all.push_back(std::move(s));
  }
  if (refine) {
    std::sort(all.begin(), all.end(), [](const DirStat& a, const DirStat& b) { return a.angle < b.angle; });
    refine_2d(x, all, projector, best);
  }
  return finish(best);
}

Eigen::VectorXd random_orthogonal(const Eigen::VectorXd& u, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (;;) {
    Eigen::VectorXd w(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) w[i] = normal(rng);
    w -= w.dot(u) * u;
    const double norm = w.norm();
    if (norm > 1e-8) return w / norm;
  }
}

OutlyingnessResult outlyingness_sampled(const Eigen::VectorXd& x, Projector& projector,
                                        const std::vector<DirStat>& shared, const Sampled& cfg) {
  Best best;
  for (const auto& s : shared) best.offer(Projector::ratio(x.dot(s.u), s), oriented(x, s));
  if (cfg.refine_steps <= 0 || std::isinf(best.value) || best.direction.size() < 2) return finish(best);
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  double half_width = 0.5;
  for (int step = 0; step < cfg.refine_steps; ++step) {
    const Eigen::VectorXd u = best.direction;
    const Eigen::VectorXd w = random_orthogonal(u, rng);
    const auto dir = [&](double angle) -> Eigen::VectorXd {
      return std::cos(angle) * u + std::sin(angle) * w;
    };
    const auto f = [&](double angle) {
      const double v = projector.ratio_at(x, dir(angle));
      return std::isinf(v) ? std::numeric_limits<double>::max() : v;
    };
    constexpr int samples = 8;
    const double spacing = 2.0 * half_width / samples;
    int best_s = 0;
    double best_v = -1.0;
    for (int s = 0; s <= samples; ++s) {
      const double v = f(-half_width + s * spacing);
      if (v > best_v) {
        best_v = v;
        best_s = s;
      }
    }
    const double a = -half_width + std::max(0, best_s - 1) * spacing;
    const double b = -half_width + std::min(samples, best_s + 1) * spacing;
    const double angle = golden_max(f, a, b, 1e-10);
    const Eigen::VectorXd v = dir(angle).normalized();
    const DirStat s = projector.stats(v);
    best.offer(Projector::ratio(x.dot(v), s), oriented(x, s));
    half_width = std::max(0.02, half_width * 0.8);
  }
  return finish(best);
}

std::vector<DirStat> sampled_stats(const DataMatrix& data, Projector& projector, const Sampled& cfg) {
  if (cfg.count < data.d() + 1) throw DomainError("sampled depth needs at least d + 1 directions");
  const Eigen::MatrixXd dirs = sample_directions(data.d(), cfg.count, cfg.seed);
  std::vector<DirStat> out;
  out.reserve(cfg.count);
  for (int i = 0; i < cfg.count; ++i) out.push_back(projector.stats(dirs.row(i).transpose()));
  return out;
}

void check_method(const DataMatrix& data, const DepthMethod& method) {
  if (std::holds_alternative<Exact1D>(method) && data.d() != 1) {
    throw DomainError("the exact method requires d = 1");
  }
  if (std::holds_alternative<Candidate2D>(method) && data.d() != 2) {
    throw DomainError("the candidate method requires d = 2");
  }
}

OutlyingnessResult outlyingness_1d(const Eigen::VectorXd& x, Projector& projector) {
  Eigen::VectorXd u = Eigen::VectorXd::Ones(1);
  const DirStat s = projector.stats(u);
  return {Projector::ratio(x[0], s), oriented(x, s)};
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1) throw DomainError("data must have n >= 1 and d >= 1");
  if (!rows_.allFinite()) throw DomainError("data entries must be finite");
}

bool DataMatrix::in_general_position() const {
  const int n_pts = n();
  const int dim = d();
  const double scale = std::max(1.0, rows_.cwiseAbs().maxCoeff());
  if (dim == 1) {
    std::vector<double> v(rows_.data(), rows_.data() + n_pts);
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  }
  const double tol = 1e-12 * std::pow(scale, dim);
  const auto degenerate = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd m(dim, dim);
    for (int j = 0; j < dim; ++j) m.col(j) = (rows_.row(idx[j + 1]) - rows_.row(idx[0])).transpose();
    return std::fabs(m.determinant()) <= tol;
  };
  if (n_pts <= dim) return true;
  // Exhaustive enumeration of (d+1)-subsets when affordable.
  double subsets = 1.0;
  for (int j = 0; j <= dim; ++j) subsets *= static_cast<double>(n_pts - j) / (j + 1);
  if (dim == 2 || subsets <= 2e6) {
    std::vector<int> idx(dim + 1);
    for (int j = 0; j <= dim; ++j) idx[j] = j;
    for (;;) {
      if (degenerate(idx)) return false;
      int pos = dim;
      while (pos >= 0 && idx[pos] == n_pts - dim - 1 + pos) --pos;
      if (pos < 0) break;
      ++idx[pos];
      for (int j = pos + 1; j <= dim; ++j) idx[j] = idx[j - 1] + 1;
    }
    return true;
  }
  std::mt19937_64 rng(0x6e6572616cULL);
  std::vector<int> all(n_pts);
  for (int i = 0; i < n_pts; ++i) all[i] = i;
  for (int trial = 0; trial < 200000; ++trial) {
    std::shuffle(all.begin(), all.end(), rng);
    if (degenerate(std::vector<int>(all.begin(), all.begin() + dim + 1))) return false;
  }
  return true;
}

DepthMethod default_method(int d, std::uint64_t seed) {
  if (d == 1) return Exact1D{};
  if (d == 2) return Candidate2D{true};
  return Sampled{1000 * d, 20, seed};
}

double outlyingness_at(const Eigen::VectorXd& x, const DataMatrix& data, int k, const Eigen::VectorXd& u) {
  check_point(x, data);
  Projector projector(data, k);
  return projector.ratio_at(x, u);
}

OutlyingnessResult outlyingness_empirical(const Eigen::VectorXd& x, const DataMatrix& data, int k,
                                          const DepthMethod& method) {
  check_point(x, data);
  check_method(data, method);
  Projector projector(data, k);
  if (std::holds_alternative<Exact1D>(method)) return outlyingness_1d(x, projector);
  if (const auto* c = std::get_if<Candidate2D>(&method)) {
    const auto shared = pair_normal_stats(data, projector);
    return outlyingness_2d(x, data, projector, shared, true, c->refine);
  }
  const auto& cfg = std::get<Sampled>(method);
  const auto shared = sampled_stats(data, projector, cfg);
  return outlyingness_sampled(x, projector, shared, cfg);
}

OutlyingnessResult outlyingness_over(const Eigen::VectorXd& x, const DataMatrix& data, int k,
                                     const Eigen::MatrixXd& directions) {
  check_point(x, data);
  if (directions.cols() != data.d() || directions.rows() < 1) {
    throw DomainError("direction matrix must have d columns and at least one row");
  }
  Projector projector(data, k);
  Best best;
  for (Eigen::Index i = 0; i < directions.rows(); ++i) {
    const Eigen::VectorXd u = directions.row(i).transpose().normalized();
    const DirStat s = projector.stats(u);
    best.offer(Projector::ratio(x.dot(u), s), oriented(x, s));
  }
  return finish(best);
}

double pd_empirical(const Eigen::VectorXd& x, const DataMatrix& data, int k, const DepthMethod& method) {
  return depth_from_outlyingness(outlyingness_empirical(x, data, k, method).value);
}

namespace {

std::vector<double> depths_impl(const Eigen::MatrixXd& points, const DataMatrix& data, int k,
                                const DepthMethod& method, bool points_are_data) {
  check_method(data, method);
  if (points.cols() != data.d()) throw DomainError("point dimension does not match the data");
  const auto count = static_cast<std::size_t>(points.rows());
  std::vector<double> out(count);
  Projector shared_projector(data, k);
  std::vector<DirStat> shared;
  if (std::holds_alternative<Candidate2D>(method)) {
    shared = pair_normal_stats(data, shared_projector);
  } else if (const auto* s = std::get_if<Sampled>(&method)) {
    shared = sampled_stats(data, shared_projector, *s);
  }
  parallel_for(count, [&](std::size_t i) {
    const Eigen::VectorXd x = points.row(static_cast<Eigen::Index>(i)).transpose();
    check_point(x, data);
    Projector projector(data, k);
    OutlyingnessResult r;
    if (std::holds_alternative<Exact1D>(method)) {
      r = outlyingness_1d(x, projector);
    } else if (const auto* c = std::get_if<Candidate2D>(&method)) {
      r = outlyingness_2d(x, data, projector, shared, !points_are_data, c->refine);
    } else {
      r = outlyingness_sampled(x, projector, shared, std::get<Sampled>(method));
    }
    out[i] = depth_from_outlyingness(r.value);
  });
  return out;
}

}  // namespace

std::vector<double> projection_depths(const DataMatrix& data, int k, const DepthMethod& method) {
  return depths_impl(data.rows(), data, k, method, true);
}

std::vector<double> projection_depths(const Eigen::MatrixXd& points, const DataMatrix& data, int k,
                                      const DepthMethod& method) {
  return depths_impl(points, data, k, method, false);
}

double pd_population(const Eigen::VectorXd& x, const EllipticalModel& model) {
  const double radius = model.standardize(x).norm();
  return 1.0 / (1.0 + radius / model.m0);
}

double mahalanobis_depth(const Eigen::VectorXd& x, const Eigen::VectorXd& center,
                         const Eigen::MatrixXd& scatter) {
  if (x.size() != center.size() || scatter.rows() != x.size() || scatter.cols() != x.size()) {
    throw DomainError("mahalanobis depth dimensions are inconsistent");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (scatter + scatter.transpose()));
  if (llt.info() != Eigen::Success) throw DomainError("scatter matrix must be positive definite");
  const Eigen::VectorXd z = llt.matrixL().solve(x - center);
  return 1.0 / (1.0 + z.squaredNorm());
}

Eigen::MatrixXd sample_directions(int d, int count, std::uint64_t seed) {
  if (d < 1 || count < 1) throw DomainError("direction sampling needs d >= 1 and count >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd out(count, d);
  for (int i = 0; i < count; ++i) {
    double norm = 0.0;
    do {
      for (int j = 0; j < d; ++j) out(i, j) = normal(rng);
      norm = out.row(i).norm();
    } while (norm < 1e-12);
    out.row(i) /= norm;
  }
  return out;
}

}  // namespace pdscatter
