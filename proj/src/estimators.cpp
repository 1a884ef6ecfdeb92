#include "pdscatter/estimators.hpp"

#include <cmath>

#include "pdscatter/errors.hpp"

namespace pdscatter {

namespace {

std::vector<double> apply_weights(std::span<const double> depths, const WeightSpec& spec) {
  validate(spec);
  std::vector<double> w(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) w[i] = weight_eval(spec, depths[i]);
  return w;
}

void check_depths(const DataMatrix& data, std::span<const double> depths) {
  if (static_cast<int>(depths.size()) != data.n()) throw DomainError("one depth per observation is required");
}

Eigen::VectorXd location_from(const DataMatrix& data, const std::vector<double>& w) {
  double total = 0.0;
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(data.d());
  for (int i = 0; i < data.n(); ++i) {
    if (w[i] == 0.0) continue;
    total += w[i];
    sum += w[i] * data.rows().row(i).transpose();
  }
  if (!(total > 0.0)) throw DegenerateWeightsError("total location weight is zero");
  return sum / total;
}

Eigen::MatrixXd scatter_from(const DataMatrix& data, const std::vector<double>& w, const Eigen::VectorXd& loc) {
  if (loc.size() != data.d()) throw DomainError("location dimension does not match the data");
  double total = 0.0;
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(data.d(), data.d());
  for (int i = 0; i < data.n(); ++i) {
    if (w[i] == 0.0) continue;
    const Eigen::VectorXd c = data.rows().row(i).transpose() - loc;
    total += w[i];
    sum.noalias() += w[i] * c * c.transpose();
  }
  if (!(total > 0.0)) throw DegenerateWeightsError("total scatter weight is zero");
  Eigen::MatrixXd s = sum / total;
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd spd_eigenvalues(const Eigen::MatrixXd& t) {
  if (t.rows() != t.cols() || t.rows() < 1) throw DomainError("matrix must be square");
  if (!t.allFinite()) throw DomainError("matrix entries must be finite");
  if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, t.cwiseAbs().maxCoeff())) {
    throw DomainError("matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd values = eig.eigenvalues();
  if (!(values.minCoeff() > 0.0)) throw DomainError("matrix must be positive definite");
  return values;
}

}  // namespace

Eigen::VectorXd weighted_location(const DataMatrix& data, std::span<const double> depths, const WeightSpec& w1) {
  check_depths(data, depths);
  return location_from(data, apply_weights(depths, w1));
}

Eigen::MatrixXd weighted_scatter(const DataMatrix& data, std::span<const double> depths,
                                 const Eigen::VectorXd& location, const WeightSpec& w2) {
  check_depths(data, depths);
  return scatter_from(data, apply_weights(depths, w2), location);
}

ScatterEstimate pws_from_depths(const DataMatrix& data, std::vector<double> depths, const WeightSpec& w1,
                                const WeightSpec& w2) {
  check_depths(data, depths);
  ScatterEstimate est;
  est.weights1 = apply_weights(depths, w1);
  est.weights2 = apply_weights(depths, w2);
  est.location = location_from(data, est.weights1);
  est.scatter = scatter_from(data, est.weights2, est.location);
  est.depths = std::move(depths);
  return est;
}

ScatterEstimate pws_fit(const DataMatrix& data, int k, const DepthMethod& method, const WeightSpec& w1,
                        const WeightSpec& w2) {
  validate(w1);
  validate(w2);
  return pws_from_depths(data, projection_depths(data, k, method), w1, w2);
}

double log_phi0(const Eigen::MatrixXd& t) {
  const Eigen::VectorXd values = spd_eigenvalues(t);
  const double d = static_cast<double>(values.size());
  const double mean = values.mean();
  double out = d * std::log(mean);
  for (double v : values) out -= std::log(v);
  return std::max(0.0, out);
}

double phi0(const Eigen::MatrixXd& t) { return std::exp(log_phi0(t)); }

Eigen::MatrixXd sample_covariance(const DataMatrix& data) {
  const Eigen::VectorXd mean = data.rows().colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rows().rowwise() - mean.transpose();
  Eigen::MatrixXd s = centered.transpose() * centered / data.n();
  return 0.5 * (s + s.transpose());
}

}  // namespace pdscatter
