#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracles/grid_outlyingness.hpp"
#include "pdscatter/depth.hpp"
#include "pdscatter/errors.hpp"

using namespace pdscatter;
using Catch::Approx;

namespace {

Eigen::MatrixXd gaussian_rows(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::MatrixXd column(std::initializer_list<double> xs) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return m;
}

}  // namespace

TEST_CASE("Exact1D closed form", "[depth]") {
  const DataMatrix data(column({1, 2, 3, 4, 5}));
  const auto r = outlyingness_empirical(Eigen::VectorXd::Constant(1, 5.0), data, 1, Exact1D{});
  CHECK(r.value == Approx(2.0).epsilon(1e-15));
  CHECK(r.direction(0) == 1.0);
  const auto left = outlyingness_empirical(Eigen::VectorXd::Constant(1, -1.0), data, 1, Exact1D{});
  CHECK(left.value == Approx(4.0).epsilon(1e-15));
  CHECK(left.direction(0) == -1.0);
  CHECK(outlyingness_empirical(Eigen::VectorXd::Constant(1, 3.0), data, 1, Exact1D{}).value == 0.0);
  CHECK(pd_empirical(Eigen::VectorXd::Constant(1, 5.0), data, 1, Exact1D{}) == Approx(1.0 / 3.0));
}

TEST_CASE("depth_from_outlyingness", "[depth]") {
  CHECK(depth_from_outlyingness(0.0) == 1.0);
  CHECK(depth_from_outlyingness(2.0) == Approx(1.0 / 3.0));
  CHECK(depth_from_outlyingness(std::numeric_limits<double>::infinity()) == 0.0);
}

TEST_CASE("vanishing MAD conventions", "[depth]") {
  const DataMatrix data(column({1, 1, 1, 2}));
  CHECK(outlyingness_empirical(Eigen::VectorXd::Constant(1, 3.0), data, 1, Exact1D{}).value ==
        std::numeric_limits<double>::infinity());
  CHECK(pd_empirical(Eigen::VectorXd::Constant(1, 3.0), data, 1, Exact1D{}) == 0.0);
  CHECK(pd_empirical(Eigen::VectorXd::Constant(1, 1.0), data, 1, Exact1D{}) == 1.0);
  CHECK(outlyingness_at(Eigen::VectorXd::Constant(1, 1.0), data, 1, Eigen::VectorXd::Constant(1, 1.0)) == 0.0);
}

TEST_CASE("Candidate2D matches a dense grid oracle", "[depth][property]") {
  const Eigen::MatrixXd rows = gaussian_rows(40, 2, 2024);
  const DataMatrix data(rows);
  std::vector<Eigen::Vector2d> queries{rows.row(0).transpose(), rows.row(17).transpose(), {0.0, 0.0},
                                       {3.0, -1.0}, {0.4, 0.9}, {-2.5, 2.5}};
  for (int k : {1, 2}) {
    for (const auto& x : queries) {
      const double ours = outlyingness_empirical(x, data, k, Candidate2D{true}).value;
      const double grid = oracle::grid_outlyingness(x, rows, k);
      CHECK(ours == Approx(grid).epsilon(1e-6));
      CHECK(ours >= grid * (1.0 - 1e-12));
      const double coarse = outlyingness_empirical(x, data, k, Candidate2D{false}).value;
      CHECK(coarse <= ours * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("outlyingness result invariants", "[depth][property]") {
  const DataMatrix data(gaussian_rows(30, 2, 9));
  const DataMatrix data3(gaussian_rows(30, 3, 10));
  for (const Eigen::Vector2d x : {Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(-0.3, 0.1)}) {
    for (const DepthMethod& m : {DepthMethod{Candidate2D{true}}, DepthMethod{Sampled{200, 10, 4}}}) {
      const auto r = outlyingness_empirical(x, data, 1, m);
      CHECK(r.direction.norm() == Approx(1.0).margin(1e-12));
      CHECK(outlyingness_at(x, data, 1, r.direction) == Approx(r.value).epsilon(1e-10));
    }
  }
  const Eigen::Vector3d x3(0.5, -1.0, 2.0);
  const auto r3 = outlyingness_empirical(x3, data3, 1, Sampled{3000, 20, 5});
  CHECK(r3.direction.norm() == Approx(1.0).margin(1e-12));
  CHECK(outlyingness_at(x3, data3, 1, r3.direction) == Approx(r3.value).epsilon(1e-10));
}

TEST_CASE("depth lies in [0, 1]", "[depth][property]") {
  const DataMatrix data(gaussian_rows(35, 2, 3));
  const DataMatrix data3(gaussian_rows(35, 3, 4));
  for (double v : projection_depths(data, 1, Candidate2D{true})) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (double v : projection_depths(data3, 2, Sampled{300, 5, 1})) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (double v : projection_depths(gaussian_rows(20, 2, 8) * 50.0, data, 1, Candidate2D{false})) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("batched depths equal pointwise depths", "[depth]") {
  const DataMatrix data(gaussian_rows(25, 2, 12));
  const auto batch = projection_depths(data, 1, Candidate2D{true});
  for (int i = 0; i < data.n(); ++i) {
    CHECK(batch[static_cast<std::size_t>(i)] == Approx(pd_empirical(data.row(i), data, 1, Candidate2D{true})).epsilon(1e-12));
  }
}

TEST_CASE("Candidate2D is affine equivariant", "[depth][property]") {
  const Eigen::MatrixXd rows = gaussian_rows(30, 2, 77);
  const DataMatrix data(rows);
  std::mt19937_64 rng(78);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 4; ++trial) {
    Eigen::Matrix2d a;
    a << normal(rng), normal(rng), normal(rng), normal(rng);
    if (std::fabs(a.determinant()) < 0.2) a += Eigen::Matrix2d::Identity();
    const Eigen::Vector2d b(5.0 * normal(rng), 5.0 * normal(rng));
    const Eigen::MatrixXd moved = (rows * a.transpose()).rowwise() + b.transpose();
    const DataMatrix image(moved);
    const auto before = projection_depths(data, 1, Candidate2D{true});
    const auto after = projection_depths(image, 1, Candidate2D{true});
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(after[i] == Approx(before[i]).margin(1e-8));
    const Eigen::Vector2d x(0.7, -1.9);
    CHECK(pd_empirical(a * x + b, image, 2, Candidate2D{true}) ==
          Approx(pd_empirical(x, data, 2, Candidate2D{true})).margin(1e-8));
  }
}

TEST_CASE("shared directions give orthogonal invariance", "[depth][property]") {
  const Eigen::MatrixXd rows = gaussian_rows(30, 3, 31);
  const DataMatrix data(rows);
  const Eigen::MatrixXd dirs = sample_directions(3, 500, 7);
  const Eigen::Matrix3d q = Eigen::HouseholderQR<Eigen::Matrix3d>(gaussian_rows(3, 3, 32)).householderQ();
  const DataMatrix rotated(rows * q.transpose());
  const Eigen::MatrixXd rotated_dirs = dirs * q.transpose();
  const Eigen::Vector3d x(0.3, 1.2, -0.8);
  const auto a = outlyingness_over(x, data, 1, dirs);
  const auto b = outlyingness_over(q * x, rotated, 1, rotated_dirs);
  CHECK(b.value == Approx(a.value).epsilon(1e-12));
  CHECK((b.direction - q * a.direction).norm() <= 1e-12);
}

TEST_CASE("sampled directions are unit vectors and seeded", "[depth]") {
  const auto a = sample_directions(4, 100, 3);
  const auto b = sample_directions(4, 100, 3);
  CHECK(a == b);
  for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(a.row(i).norm() == Approx(1.0).margin(1e-14));
  CHECK_FALSE(a == sample_directions(4, 100, 4));
}

TEST_CASE("Sampled approximates the supremum from below", "[depth]") {
  const Eigen::MatrixXd rows = gaussian_rows(40, 2, 5);
  const DataMatrix data(rows);
  const Eigen::Vector2d x(1.5, 0.5);
  const double exact = outlyingness_empirical(x, data, 1, Candidate2D{true}).value;
  const double sampled = outlyingness_empirical(x, data, 1, Sampled{2000, 20, 9}).value;
  CHECK(sampled <= exact * (1.0 + 1e-12));
  CHECK(sampled == Approx(exact).epsilon(1e-3));
}

TEST_CASE("Exact1D depth is monotone along rays from the median", "[depth][property]") {
  const DataMatrix data(gaussian_rows(31, 1, 6));
  std::vector<double> xs(data.rows().data(), data.rows().data() + data.n());
  const double med = [&] {
    auto s = xs;
    std::sort(s.begin(), s.end());
    return s[15];
  }();
  for (double sign : {-1.0, 1.0}) {
    double prev = 2.0;
    for (double t = 0.0; t <= 6.0; t += 0.05) {
      const double v = pd_empirical(Eigen::VectorXd::Constant(1, med + sign * t), data, 1, Exact1D{});
      CHECK(v <= prev);
      prev = v;
    }
  }
}

TEST_CASE("pd_population", "[depth]") {
  Eigen::Matrix2d s;
  s << 2.0, 0.5, 0.5, 1.0;
  const auto model = EllipticalModel::make(Eigen::Vector2d(1.0, -1.0), s);
  CHECK(pd_population(model.theta, model) == 1.0);
  const Eigen::Vector2d dir = Eigen::Vector2d(0.6, 0.8);
  const Eigen::Vector2d at_m0 = model.theta + model.sigma_half * (model.m0 * dir);
  CHECK(pd_population(at_m0, model) == Approx(0.5).epsilon(1e-12));
  for (double r : {0.3, 1.0, 4.0}) {
    const Eigen::Vector2d p1 = model.theta + model.sigma_half * (r * Eigen::Vector2d(1.0, 0.0));
    const Eigen::Vector2d p2 = model.theta + model.sigma_half * (r * dir);
    CHECK(pd_population(p1, model) == Approx(pd_population(p2, model)).epsilon(1e-12));
  }
  double prev = 1.0;
  for (double r = 0.1; r < 100.0; r *= 1.5) {
    const double v = pd_population(model.theta + model.sigma_half * (r * dir), model);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("mahalanobis_depth", "[depth]") {
  Eigen::Matrix2d s;
  s << 4.0, 1.0, 1.0, 2.0;
  const Eigen::Vector2d c(1.0, 2.0);
  CHECK(mahalanobis_depth(c, c, s) == 1.0);
  const Eigen::Matrix2d l = s.llt().matrixL();
  CHECK(mahalanobis_depth(c + l * Eigen::Vector2d(0.6, 0.8), c, s) == Approx(0.5).epsilon(1e-12));
  Eigen::Matrix2d a;
  a << 1.3, -0.4, 0.7, 2.1;
  const Eigen::Vector2d b(-3.0, 0.5);
  const Eigen::Vector2d x(0.2, -1.7);
  CHECK(mahalanobis_depth(a * x + b, a * c + b, a * s * a.transpose()) ==
        Approx(mahalanobis_depth(x, c, s)).margin(1e-10));
  Eigen::Matrix2d singular;
  singular << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(mahalanobis_depth(x, c, singular), DomainError);
}

TEST_CASE("general position and input validation", "[depth]") {
  Eigen::MatrixXd collinear(4, 2);
  collinear << 0, 0, 1, 1, 2, 2, 0, 1;
  CHECK_FALSE(DataMatrix(collinear).in_general_position());
  CHECK(DataMatrix(gaussian_rows(20, 2, 1)).in_general_position());
  Eigen::MatrixXd bad = gaussian_rows(5, 2, 1);
  bad(2, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DataMatrix(bad), DomainError);
  CHECK_THROWS_AS(DataMatrix(Eigen::MatrixXd(0, 2)), DomainError);
  const DataMatrix data2(gaussian_rows(10, 2, 2));
  CHECK_THROWS_AS(outlyingness_empirical(Eigen::Vector2d(0, 0), data2, 1, Exact1D{}), DomainError);
  CHECK_THROWS_AS(outlyingness_empirical(Eigen::Vector3d(0, 0, 0), data2, 1, Candidate2D{}), DomainError);
  CHECK_THROWS_AS(outlyingness_empirical(Eigen::Vector2d(0, 0), data2, 1, Sampled{2, 0, 1}), DomainError);
  CHECK_THROWS_AS(outlyingness_empirical(Eigen::Vector2d(0, INFINITY), data2, 1, Candidate2D{}), DomainError);
  CHECK(std::holds_alternative<Exact1D>(default_method(1)));
  CHECK(std::holds_alternative<Candidate2D>(default_method(2)));
  CHECK(std::get<Sampled>(default_method(4)).count == 4000);
}
