#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdscatter/depth.hpp"
#include "pdscatter/estimators.hpp"
#include "pdscatter/weights.hpp"

namespace pdscatter {

// PointMass places each outlier exactly at `outlier`; Shifted draws it from
// N(outlier, I_d).
enum class ContaminationShape { PointMass, Shifted };

struct SimConfig {
  int n = 100;
  int d = 2;
  double eps = 0.0;
  Eigen::VectorXd outlier = Eigen::Vector2d(100.0, 0.0);
  int replicates = 400;
  std::uint64_t seed = 1;
  int k = 1;
  DepthMethod method = Candidate2D{true};
  WeightSpec w1{1, 0.3229, 2.0};
  WeightSpec w2{2, 0.3229, 2.0};
  // Exactly round(eps n) outliers in the first rows instead of Bernoulli draws.
  bool fixed_count = false;
  ContaminationShape shape = ContaminationShape::PointMass;
};

void validate(const SimConfig& config);

struct SimReport {
  SimConfig config;
  double lrt_pws = 0.0;
  double lrt_cov = 0.0;
  std::optional<double> llrt_pws;
  std::optional<double> llrt_cov;
  std::optional<double> re;
  int replicate_count = 0;
  std::vector<double> phi0_pws;
  std::vector<double> phi0_cov;
  std::vector<std::string> warnings;
};

// n * replicates above which table3_run adds a runtime warning.
constexpr double kSimulationBudget = 4.0e5;

// Draw `replicate_index` of the configured mixture. The generator is seeded
// from (seed, replicate_index) only.
DataMatrix sample_contaminated(const SimConfig& config, int replicate_index);

SimReport table3_run(const SimConfig& config);

enum class LrtEstimator { PWS, COV };

struct LrtCheck {
  double mean;
  double std_error;
  int replicates;
};

// Mean of n log phi0 over clean N(0, I_d) samples.
LrtCheck lrt_limit_check(LrtEstimator estimator, int n, int replicates, int d, std::uint64_t seed,
                         const DepthMethod& method, const WeightSpec& w1, const WeightSpec& w2, int k = 1);

struct Fraction {
  long num;
  long den;
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }
  double value() const { return static_cast<double>(num) / den; }
  bool operator==(const Fraction&) const = default;
};

// min{floor((n-k+2)/2), floor((n+k+1-2d)/2)} / n, unreduced.
Fraction rbp_theoretical(int n, int d, int k);

// floor((n-d+1)/2) / n.
Fraction affine_rbp_bound(int n, int d);

enum class Adversary { Explosion, Implosion };

const char* adversary_name(Adversary a);

// Copy of `data` with rows 0..m-1 replaced by the adversarial configuration at
// scale t.
DataMatrix contaminate_rows(const DataMatrix& data, int m, Adversary family, double t);

// trace(V V_m^{-1} + V^{-1} V_m) at each t of the ladder {1e2, 1e4, 1e6, 1e8};
// +inf when V_m is singular or its weights degenerate.
std::vector<double> trace_ladder(const DataMatrix& data, int m, Adversary family, int k, const DepthMethod& method,
                                 const WeightSpec& w1, const WeightSpec& w2);

// Both ratios across the top three levels of the ladder exceed 10.
bool ladder_breaks_down(const std::vector<double>& ladder);

struct RbpProbeResult {
  Fraction empirical;
  std::optional<Adversary> family;
  std::string log;
};

RbpProbeResult rbp_probe(const DataMatrix& data, int k, const DepthMethod& method, const WeightSpec& w1,
                         const WeightSpec& w2);

}  // namespace pdscatter
