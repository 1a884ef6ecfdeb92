#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pdscatter/depth.hpp"
#include "pdscatter/weights.hpp"

namespace pdscatter {

struct ScatterEstimate {
  Eigen::VectorXd location;
  Eigen::MatrixXd scatter;
  std::vector<double> depths;
  std::vector<double> weights1;
  std::vector<double> weights2;
};

// sum x_i w1(D_i) / sum w1(D_i).
Eigen::VectorXd weighted_location(const DataMatrix& data, std::span<const double> depths, const WeightSpec& w1);

// sum (x_i - L)(x_i - L)' w2(D_i) / sum w2(D_i).
Eigen::MatrixXd weighted_scatter(const DataMatrix& data, std::span<const double> depths,
                                 const Eigen::VectorXd& location, const WeightSpec& w2);

// Projection depths of the rows (Med, MAD_k), then location with w1 and
// scatter about it with w2.
ScatterEstimate pws_fit(const DataMatrix& data, int k, const DepthMethod& method, const WeightSpec& w1,
                        const WeightSpec& w2);

// Same, from precomputed depths.
ScatterEstimate pws_from_depths(const DataMatrix& data, std::vector<double> depths, const WeightSpec& w1,
                                const WeightSpec& w2);

// (trace(T)/d)^d / det(T).
double phi0(const Eigen::MatrixXd& t);

// d log(mean eigenvalue) - sum log(eigenvalue); avoids overflow of the ratio.
double log_phi0(const Eigen::MatrixXd& t);

// 1/n sample covariance.
Eigen::MatrixXd sample_covariance(const DataMatrix& data);

}  // namespace pdscatter
