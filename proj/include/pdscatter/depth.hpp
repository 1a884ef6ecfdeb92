#pragma once

#include <cmath>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pdscatter/model.hpp"

namespace pdscatter {

// n observations of dimension d stored as the rows of a matrix.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd rows);

  int n() const { return static_cast<int>(rows_.rows()); }
  int d() const { return static_cast<int>(rows_.cols()); }
  const Eigen::MatrixXd& rows() const { return rows_; }
  Eigen::VectorXd row(int i) const { return rows_.row(i).transpose(); }

  // No more than d points on any (d-1)-dimensional affine subspace. Exhaustive
  // for d <= 2 and for small n; random (d+1)-subsets otherwise.
  bool in_general_position() const;

 private:
  Eigen::MatrixXd rows_;
};

struct Exact1D {};

struct Candidate2D {
  bool refine = true;
};

struct Sampled {
  int count = 1000;
  int refine_steps = 20;
  std::uint64_t seed = 1;
};

using DepthMethod = std::variant<Exact1D, Candidate2D, Sampled>;

// Exact1D for d = 1, Candidate2D for d = 2, Sampled with 1000 d directions
// otherwise.
DepthMethod default_method(int d, std::uint64_t seed = 1);

struct OutlyingnessResult {
  double value = 0.0;
  Eigen::VectorXd direction;
};

// |u'x - Med(u'X)| / MAD_k(u'X) at a single direction u. Returns +inf when the
// MAD vanishes and the numerator does not, 0 for 0/0.
double outlyingness_at(const Eigen::VectorXd& x, const DataMatrix& data, int k,
                       const Eigen::VectorXd& u);

OutlyingnessResult outlyingness_empirical(const Eigen::VectorXd& x, const DataMatrix& data, int k,
                                          const DepthMethod& method);

// Maximum of the ratio over the rows of `directions` (each normalized first).
OutlyingnessResult outlyingness_over(const Eigen::VectorXd& x, const DataMatrix& data, int k,
                                     const Eigen::MatrixXd& directions);

double pd_empirical(const Eigen::VectorXd& x, const DataMatrix& data, int k, const DepthMethod& method);

// Projection depth of every row of `data` with respect to `data`. Shares the
// per-direction Med/MAD computations across points.
std::vector<double> projection_depths(const DataMatrix& data, int k, const DepthMethod& method);

// Projection depth of each row of `points` with respect to `data`.
std::vector<double> projection_depths(const Eigen::MatrixXd& points, const DataMatrix& data, int k,
                                      const DepthMethod& method);

double pd_population(const Eigen::VectorXd& x, const EllipticalModel& model);

double mahalanobis_depth(const Eigen::VectorXd& x, const Eigen::VectorXd& center,
                         const Eigen::MatrixXd& scatter);

// `count` directions drawn uniformly on the unit sphere (rows).
Eigen::MatrixXd sample_directions(int d, int count, std::uint64_t seed);

inline double depth_from_outlyingness(double o) { return std::isinf(o) ? 0.0 : 1.0 / (1.0 + o); }

}  // namespace pdscatter
