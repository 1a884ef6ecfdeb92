#include "pdscatter/simlab.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pdscatter/errors.hpp"
#include "pdscatter/parallel.hpp"

namespace pdscatter {

namespace {

constexpr std::array<double, 4> kLadder{1e2, 1e4, 1e6, 1e8};
constexpr double kBreakdownRatio = 10.0;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void validate(const SimConfig& c) {
  if (c.n < 1 || c.d < 1) throw DomainError("simulation needs n >= 1 and d >= 1");
  if (c.replicates < 1) throw DomainError("simulation needs at least one replicate");
  if (!(c.eps >= 0.0) || !(c.eps < 1.0)) throw DomainError("contamination fraction must lie in [0, 1)");
  if (c.outlier.size() != c.d) throw DomainError("outlier dimension does not match d");
  if (c.k < 1 || c.k > c.n) throw DomainError("MAD_k needs 1 <= k <= n");
  validate(c.w1);
  validate(c.w2);
}

DataMatrix sample_contaminated(const SimConfig& c, int replicate_index) {
  validate(c);
  auto rng = stream(c.seed, static_cast<std::uint64_t>(replicate_index));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  Eigen::MatrixXd rows(c.n, c.d);
  const int fixed = static_cast<int>(std::lround(c.eps * c.n));
  for (int i = 0; i < c.n; ++i) {
    const bool outlier = c.fixed_count ? i < fixed : unit(rng) < c.eps;
    if (outlier && c.shape == ContaminationShape::PointMass) {
      rows.row(i) = c.outlier.transpose();
      continue;
    }
    for (int j = 0; j < c.d; ++j) rows(i, j) = normal(rng);
    if (outlier) rows.row(i) += c.outlier.transpose();
  }
  return DataMatrix(std::move(rows));
}

SimReport table3_run(const SimConfig& c) {
  validate(c);
  SimReport report;
  report.config = c;
  if (static_cast<double>(c.n) * c.replicates > kSimulationBudget) {
    report.warnings.push_back("n * replicates exceeds the desk budget of " +
                              std::to_string(static_cast<long>(kSimulationBudget)) + "; expect a long run");
  }
  const auto reps = static_cast<std::size_t>(c.replicates);
  report.phi0_pws.resize(reps);
  report.phi0_cov.resize(reps);
  std::vector<double> log_pws(reps);
  std::vector<double> log_cov(reps);
  parallel_for(reps, [&](std::size_t j) {
    const DataMatrix data = sample_contaminated(c, static_cast<int>(j));
    ScatterEstimate est;
    try {
      est = pws_fit(data, c.k, c.method, c.w1, c.w2);
    } catch (const DegenerateWeightsError& e) {
      throw DegenerateWeightsError("replicate " + std::to_string(j) + ": " + e.what());
    }
    log_pws[j] = log_phi0(est.scatter);
    log_cov[j] = log_phi0(sample_covariance(data));
    report.phi0_pws[j] = std::exp(log_pws[j]);
    report.phi0_cov[j] = std::exp(log_cov[j]);
  });
  report.replicate_count = c.replicates;
  report.lrt_pws = mean_of(report.phi0_pws);
  report.lrt_cov = mean_of(report.phi0_cov);
  if (c.eps == 0.0) {
    report.llrt_pws = c.n * mean_of(log_pws);
    report.llrt_cov = c.n * mean_of(log_cov);
    report.re = *report.llrt_cov / *report.llrt_pws;
  }
  return report;
}

LrtCheck lrt_limit_check(LrtEstimator estimator, int n, int replicates, int d, std::uint64_t seed,
                         const DepthMethod& method, const WeightSpec& w1, const WeightSpec& w2, int k) {
  if (replicates < 2) throw DomainError("the limit check needs at least two replicates");
  SimConfig c;
  c.n = n;
  c.d = d;
  c.eps = 0.0;
  c.outlier = Eigen::VectorXd::Zero(d);
  c.replicates = replicates;
  c.seed = seed;
  c.k = k;
  c.method = method;
  c.w1 = w1;
  c.w2 = w2;
  validate(c);
  std::vector<double> stat(static_cast<std::size_t>(replicates));
  parallel_for(stat.size(), [&](std::size_t j) {
    const DataMatrix data = sample_contaminated(c, static_cast<int>(j));
    const Eigen::MatrixXd s =
        estimator == LrtEstimator::COV ? sample_covariance(data) : pws_fit(data, k, method, w1, w2).scatter;
    stat[j] = n * log_phi0(s);
  });
  const double mean = mean_of(stat);
  double ss = 0.0;
  for (double v : stat) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (replicates - 1));
  return {mean, sd / std::sqrt(static_cast<double>(replicates)), replicates};
}

Fraction rbp_theoretical(int n, int d, int k) {
  if (d < 1 || n <= 2 * d) throw DomainError("the breakdown formula needs n > 2d");
  if (k < 1 || k > n) throw DomainError("the breakdown formula needs 1 <= k <= n");
  const long first = (n - k + 2) / 2;
  const long second = (n + k + 1 - 2 * d) / 2;
  return {std::min(first, second), n};
}

Fraction affine_rbp_bound(int n, int d) {
  if (d < 1 || n < 1) throw DomainError("bound needs n, d >= 1");
  return {(n - d + 1) / 2, n};
}

const char* adversary_name(Adversary a) { return a == Adversary::Explosion ? "explosion" : "implosion"; }

DataMatrix contaminate_rows(const DataMatrix& data, int m, Adversary family, double t) {
  const int n = data.n();
  const int d = data.d();
  if (m < 0 || m > n - 2) throw DomainError("cannot replace that many rows");
  Eigen::MatrixXd rows = data.rows();
  if (family == Adversary::Explosion) {
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(d, 1.0, 0.5);
    v.normalize();
    for (int i = 0; i < m; ++i) rows.row(i) = t * v.transpose();
    return DataMatrix(std::move(rows));
  }
  // Points on a hyperplane through two kept rows, jittered off it by
  // +-t^{-1/2}. The pair is chosen so the remaining kept rows sit as far from
  // the hyperplane as possible.
  auto frame = [&](int ia, int ib) {
    Eigen::VectorXd along = data.row(ib) - data.row(ia);
    Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(d, d);
    basis.col(0) = along.normalized();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
    return Eigen::MatrixXd(qr.householderQ());
  };
  int best_a = n - 2;
  int best_b = n - 1;
  double best_gap = -1.0;
  for (int ia = m; ia < n; ++ia) {
    for (int ib = ia + 1; ib < n; ++ib) {
      if ((data.row(ib) - data.row(ia)).norm() == 0.0) continue;
      const Eigen::VectorXd nrm = frame(ia, ib).col(d - 1);
      double gap = std::numeric_limits<double>::infinity();
      for (int i = m; i < n; ++i) {
        if (i == ia || i == ib) continue;
        gap = std::min(gap, std::fabs((data.row(i) - data.row(ia)).dot(nrm.transpose())));
      }
      if (gap > best_gap) {
        best_gap = gap;
        best_a = ia;
        best_b = ib;
      }
    }
  }
  const Eigen::VectorXd a = data.row(best_a);
  const Eigen::VectorXd b = data.row(best_b);
  const double len = (b - a).norm();
  if (len == 0.0) throw PreconditionError("kept rows coincide");
  const Eigen::MatrixXd q = frame(best_a, best_b);
  const Eigen::VectorXd along = q.col(0);
  const Eigen::VectorXd normal = q.col(d - 1);
  const double jitter = 1.0 / std::sqrt(t);
  for (int i = 0; i < m; ++i) {
    Eigen::VectorXd p = a + (0.5 + 0.37 * i) * len * along;
    for (int j = 1; j < d - 1; ++j) p += (0.21 * ((i + j) % 5) - 0.4) * len * q.col(j);
    p += (i % 2 == 0 ? jitter : -jitter) * normal;
    rows.row(i) = p.transpose();
  }
  return DataMatrix(std::move(rows));
}

std::vector<double> trace_ladder(const DataMatrix& data, int m, Adversary family, int k, const DepthMethod& method,
                                 const WeightSpec& w1, const WeightSpec& w2) {
  const Eigen::MatrixXd v = pws_fit(data, k, method, w1, w2).scatter;
  const Eigen::MatrixXd v_inv = v.inverse();
  std::vector<double> out;
  for (double t : kLadder) {
    const DataMatrix bad = contaminate_rows(data, m, family, t);
    double value = std::numeric_limits<double>::infinity();
    try {
      const Eigen::MatrixXd vm = pws_fit(bad, k, method, w1, w2).scatter;
      Eigen::LLT<Eigen::MatrixXd> llt(vm);
      if (llt.info() == Eigen::Success) {
        const double tr = (v * llt.solve(Eigen::MatrixXd::Identity(vm.rows(), vm.cols()))).trace() +
                          (v_inv * vm).trace();
        if (std::isfinite(tr)) value = tr;
      }
    } catch (const DegenerateWeightsError&) {
    }
    out.push_back(value);
  }
  return out;
}

bool ladder_breaks_down(const std::vector<double>& ladder) {
  if (ladder.size() < 3) throw DomainError("the ladder needs at least three levels");
  for (std::size_t i = ladder.size() - 3; i + 1 < ladder.size(); ++i) {
    if (std::isinf(ladder[i + 1])) continue;
    if (!(ladder[i + 1] > kBreakdownRatio * ladder[i])) return false;
  }
  return true;
}

RbpProbeResult rbp_probe(const DataMatrix& data, int k, const DepthMethod& method, const WeightSpec& w1,
                         const WeightSpec& w2) {
  const int n = data.n();
  const int d = data.d();
  if (n <= 2 * d) throw PreconditionError("the breakdown probe needs n > 2d");
  if (!data.in_general_position()) throw PreconditionError("data are not in general position");
  std::ostringstream log;
  for (int m = 1; m <= n - 2; ++m) {
    for (Adversary family : {Adversary::Explosion, Adversary::Implosion}) {
      const auto ladder = trace_ladder(data, m, family, k, method, w1, w2);
      const bool broke = ladder_breaks_down(ladder);
      log << "m=" << m << " " << adversary_name(family) << " trace:";
      for (double v : ladder) log << " " << v;
      log << (broke ? " -> breakdown" : " -> bounded") << "\n";
      if (broke) return {{m, n}, family, log.str()};
    }
  }
  return {{n - 1, n}, std::nullopt, log.str()};
}

}  // namespace pdscatter
