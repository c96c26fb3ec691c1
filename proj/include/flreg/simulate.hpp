#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "flreg/estimator.hpp"
#include "flreg/grid.hpp"
#include "flreg/rng.hpp"

namespace flreg {

/// Karhunen-Loeve eigenfunction of the Wiener process on [0,1]:
/// v_j(t) = sqrt(2) sin((j - 1/2) pi t).
double kl_eigenfunction(std::size_t j, double t);

/// Matching eigenvalue lambda_j = [(j - 1/2) pi]^{-2}.
double kl_eigenvalue(std::size_t j);

struct WienerConfig {
  std::size_t truncation = 100;  // KL terms
  GridPtr grid;
};

struct WienerDraw {
  Curve curve;
  std::vector<double> scores;  // N_{i,1..J}
};

/// Truncated KL expansion with independent scores N_j ~ N(0, lambda_j).
WienerDraw sample_wiener(const WienerConfig& cfg, CounterRng& rng);

/// Stationary AR(1) noise: first element from N(0, var_u/(1-alpha^2)),
/// recursion eps_i = alpha eps_{i-1} + u_i thereafter.
std::vector<double> gen_ar1(std::size_t n, double alpha, double var_u,
                            CounterRng& rng);

enum class DgpResponse {
  SqrtFirstTwoScores,  // m_i = sqrt(|N_{i,1} + N_{i,2}|)
  Constant,            // m_i = constant_value (degenerate test target)
};

struct DgpConfig {
  std::size_t n = 100;
  double ar_alpha = 0.0;       // |alpha| < 1
  double u_variance = 0.01;
  WienerConfig wiener;
  std::uint64_t seed = 1;
  DgpResponse response = DgpResponse::SqrtFirstTwoScores;
  double constant_value = 0.0;
};

struct DgpDraw {
  FunctionalSample sample;
  std::vector<double> true_m;  // regression values m(chi_i)
};

// The Gaussian score sum N_1 + N_2 is negative with probability ~1/2, so
// the square root is taken of its absolute value to keep the target total.
DgpDraw gen_dgp(const DgpConfig& cfg, CounterRng& rng);

struct McMethodSpec {
  Method method = Method::Fll;
  KernelSpec kernel;
  std::vector<std::size_t> r_candidates = {1, 2, 3, 4, 5, 6};
  CvGridSpec h_grid;
};

struct McReplicate {
  std::size_t index = 0;
  double mspe = 0.0;
  double h = 0.0;
  std::size_t r_d = 0;
  std::size_t r_beta = 0;
  bool failed = false;  // no valid CV candidate
};

struct McSeries {
  Method method = Method::Fll;
  std::vector<McReplicate> replicates;
};

struct McResult {
  std::vector<McSeries> series;  // one per requested estimator
};

/// Monte Carlo study: per replicate a fresh sample is drawn, each estimator
/// is LOO-CV tuned and evaluated in sample against the true regression
/// values. Replicate j uses the substream derived from (seed, j), so results
/// are bitwise identical across thread counts.
McResult run_monte_carlo(const DgpConfig& dgp, std::size_t n_r,
                         const std::vector<McMethodSpec>& estimators,
                         std::size_t threads = 1);

double median(std::vector<double> values);

struct RateReport {
  std::vector<std::size_t> n_values;
  std::vector<double> median_mspe;
  double slope = 0.0;      // least-squares slope of log MSPE on log n
  bool near_zero = false;  // all medians below 1e-8: slope is meaningless
};

/// Median MSPE per sample size plus the fitted log-log slope.
RateReport rate_check(const std::vector<std::size_t>& n_list,
                      const DgpConfig& dgp_template,
                      const McMethodSpec& method, std::size_t n_r,
                      std::size_t threads = 1);

}  // namespace flreg
