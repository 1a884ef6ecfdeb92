#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "pdscatter/asymptotics.hpp"
#include "pdscatter/errors.hpp"
#include "pdscatter/estimators.hpp"

using namespace pdscatter;
using Catch::Approx;

namespace {

const WeightSpec kW1{1, 0.3229, 2.0};
const WeightSpec kW2{2, 0.3229, 2.0};

Eigen::MatrixXd gaussian_rows(int n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) m(i, j) = normal(rng);
  }
  return m;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().cwiseAbs().maxCoeff();
}

void check_scatter_invariants(const ScatterEstimate& e, const DataMatrix& data) {
  const Eigen::MatrixXd& s = e.scatter;
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + s.cwiseAbs().maxCoeff()));
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues().minCoeff() >= -1e-10 * s.trace());
  Eigen::VectorXd loc = Eigen::VectorXd::Zero(data.d());
  double total = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    loc += e.weights1[static_cast<std::size_t>(i)] * data.row(i);
    total += e.weights1[static_cast<std::size_t>(i)];
  }
  CHECK((e.location - loc / total).norm() <= 1e-10 * (1.0 + e.location.norm()));
}

}  // namespace

TEST_CASE("constant depths reduce to mean and 1/n covariance", "[estimators]") {
  const DataMatrix data(gaussian_rows(50, 3, 1));
  const Eigen::VectorXd mean = data.rows().colwise().mean();
  for (double depth : {0.1, 0.5}) {
    const std::vector<double> depths(50, depth);
    const auto loc = weighted_location(data, depths, kW1);
    CHECK((loc - mean).norm() <= 1e-12);
    const auto scat = weighted_scatter(data, depths, loc, kW2);
    CHECK((scat - sample_covariance(data)).norm() <= 1e-12);
  }
  const Eigen::MatrixXd centered = data.rows().rowwise() - mean.transpose();
  CHECK((sample_covariance(data) - centered.transpose() * centered / 50.0).norm() <= 1e-12);
}

TEST_CASE("zero-weight points are excluded", "[estimators]") {
  Eigen::MatrixXd rows = gaussian_rows(10, 2, 2);
  rows.row(3) << 1e6, -1e6;
  const DataMatrix data(rows);
  std::vector<double> depths(10, 0.4);
  depths[3] = 0.0;
  Eigen::MatrixXd rest(9, 2);
  for (int i = 0, j = 0; i < 10; ++i) {
    if (i != 3) rest.row(j++) = rows.row(i);
  }
  const Eigen::VectorXd loc = weighted_location(data, depths, kW1);
  CHECK((loc - rest.colwise().mean().transpose()).norm() <= 1e-12);
  CHECK((weighted_scatter(data, depths, loc, kW2) - sample_covariance(DataMatrix(rest))).norm() <= 1e-12);
}

TEST_CASE("symmetric data with symmetric depths is centred", "[estimators]") {
  const Eigen::MatrixXd half = gaussian_rows(15, 2, 3);
  Eigen::MatrixXd rows(30, 2);
  const Eigen::RowVector2d c(2.0, -1.0);
  rows << half.rowwise() + c, (-half).rowwise() + c;
  const DataMatrix data(rows);
  std::vector<double> depths(30);
  for (int i = 0; i < 15; ++i) depths[static_cast<std::size_t>(i)] = depths[static_cast<std::size_t>(i + 15)] = 0.05 + 0.02 * i;
  CHECK((weighted_location(data, depths, kW1) - c.transpose()).norm() <= 1e-12);
}

TEST_CASE("simplex scatter by hand", "[estimators]") {
  Eigen::MatrixXd rows(3, 2);
  rows << 0, 0, 3, 0, 0, 3;
  const DataMatrix data(rows);
  const std::vector<double> depths(3, 0.3);
  const auto loc = weighted_location(data, depths, kW1);
  CHECK(loc.isApprox(Eigen::Vector2d(1.0, 1.0)));
  Eigen::Matrix2d expect;
  expect << 2.0, -1.0, -1.0, 2.0;
  const auto s = weighted_scatter(data, depths, loc, kW2);
  CHECK((s - expect).norm() <= 1e-12);
  CHECK(s.trace() == Approx(4.0));
}

TEST_CASE("all-zero depths are degenerate", "[estimators]") {
  const DataMatrix data(gaussian_rows(5, 2, 4));
  const std::vector<double> zero(5, 0.0);
  CHECK_THROWS_AS(weighted_location(data, zero, kW1), DegenerateWeightsError);
  CHECK_THROWS_AS(weighted_scatter(data, zero, Eigen::Vector2d::Zero(), kW2), DegenerateWeightsError);
  CHECK_THROWS_AS(pws_from_depths(data, zero, kW1, kW2), DegenerateWeightsError);
}

TEST_CASE("pws_fit at a large clean sample is close to c1 I", "[estimators]") {
  // 1000 random directions are accurate to ~1e-6 in the plane; the band is the
  // mean of four seeded samples.
  const double c1 = c_constants(2, kW2).c1;
  Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
  for (std::uint64_t seed = 2000; seed < 2004; ++seed) {
    const DataMatrix data(gaussian_rows(2000, 2, seed));
    const auto est = pws_fit(data, 1, Sampled{1000, 0, 1}, kW1, kW2);
    check_scatter_invariants(est, data);
    mean += est.scatter / 4.0;
  }
  CHECK(spectral_norm(mean - c1 * Eigen::Matrix2d::Identity()) < 0.1);
}

TEST_CASE("pws_fit stays bounded under point-mass contamination", "[estimators]") {
  Eigen::MatrixXd rows = gaussian_rows(100, 2, 10);
  for (int i = 0; i < 10; ++i) rows.row(i) << 100.0, 0.0;
  const DataMatrix data(rows);
  const auto est = pws_fit(data, 1, Candidate2D{true}, kW1, kW2);
  CHECK(spectral_norm(est.scatter) < 3.0);
  CHECK(spectral_norm(sample_covariance(data)) > 500.0);
  check_scatter_invariants(est, data);
}

TEST_CASE("pws_fit is affine equivariant", "[estimators][property]") {
  const Eigen::MatrixXd rows = gaussian_rows(40, 2, 21);
  Eigen::Matrix2d a;
  a << 2.0, 0.7, -0.3, 0.5;
  const Eigen::Vector2d b(10.0, -4.0);
  const DataMatrix data(rows);
  const DataMatrix image((rows * a.transpose()).rowwise() + b.transpose());
  const auto e0 = pws_fit(data, 1, Candidate2D{true}, kW1, kW2);
  const auto e1 = pws_fit(image, 1, Candidate2D{true}, kW1, kW2);
  CHECK((e1.location - (a * e0.location + b)).norm() <= 1e-6);
  CHECK((e1.scatter - a * e0.scatter * a.transpose()).norm() <= 1e-6);
  const auto scaled = pws_fit(DataMatrix(rows * 7.5), 1, Candidate2D{true}, kW1, kW2);
  CHECK((scaled.scatter - 56.25 * e0.scatter).norm() <= 1e-6 * 56.25);
  for (int i = 0; i < 40; ++i) CHECK(e1.depths[static_cast<std::size_t>(i)] == Approx(e0.depths[static_cast<std::size_t>(i)]).margin(1e-8));
}

TEST_CASE("pws_fit output invariants", "[estimators][property]") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const DataMatrix data(gaussian_rows(30, 2, seed));
    const auto est = pws_fit(data, 1 + static_cast<int>(seed % 2), Candidate2D{true}, kW1, kW2);
    check_scatter_invariants(est, data);
    for (std::size_t i = 0; i < est.depths.size(); ++i) {
      CHECK(est.weights1[i] == Approx(weight_eval(kW1, est.depths[i])));
      CHECK(est.weights2[i] == Approx(weight_eval(kW2, est.depths[i])));
      CHECK(est.depths[i] >= 0.0);
      CHECK(est.depths[i] <= 1.0);
    }
  }
  const DataMatrix data3(gaussian_rows(40, 3, 9));
  check_scatter_invariants(pws_fit(data3, 1, Sampled{300, 5, 2}, kW1, kW2), data3);
}

TEST_CASE("phi0 examples and invariances", "[estimators]") {
  for (int d : {1, 2, 5}) CHECK(phi0(Eigen::MatrixXd::Identity(d, d)) == Approx(1.0));
  CHECK(phi0(Eigen::Vector2d(2.0, 1.0).asDiagonal().toDenseMatrix()) == Approx(1.125));
  CHECK(phi0(3.7 * Eigen::MatrixXd::Identity(3, 3)) == Approx(1.0));
  Eigen::MatrixXd t(3, 3);
  t << 3.0, 0.4, 0.1, 0.4, 1.0, -0.2, 0.1, -0.2, 0.5;
  const Eigen::Matrix3d q = Eigen::HouseholderQR<Eigen::Matrix3d>(gaussian_rows(3, 3, 8)).householderQ();
  CHECK(phi0(2.5 * t) == Approx(phi0(t)).epsilon(1e-12));
  CHECK(phi0(q * t * q.transpose()) == Approx(phi0(t)).epsilon(1e-10));
  CHECK(log_phi0(t) == Approx(std::log(phi0(t))).epsilon(1e-12));
  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(phi0(bad), DomainError);
}

TEST_CASE("phi0 is at least one on random SPD matrices", "[estimators][property]") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 4;
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian_rows(d, d, 100 + trial)).householderQ();
    Eigen::VectorXd ev(d);
    for (int j = 0; j < d; ++j) ev(j) = unif(rng);
    const Eigen::MatrixXd t = q * ev.asDiagonal() * q.transpose();
    CHECK(phi0(t) >= 1.0 - 1e-12);
  }
  double prev = INFINITY;
  for (double spread : {1.0, 0.1, 0.01, 0.001, 0.0}) {
    const double v = phi0(Eigen::Vector3d(1.0 + spread, 1.0, 1.0 - spread * 0.5).asDiagonal().toDenseMatrix());
    CHECK(v <= prev);
    prev = v;
  }
  CHECK(prev == Approx(1.0).margin(1e-14));
}
