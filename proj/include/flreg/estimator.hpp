#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "flreg/grid.hpp"
#include "flreg/kernels.hpp"
#include "flreg/semimetric.hpp"

namespace flreg {

struct NoValidCandidateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TransformKind { Identity, IndicatorAtOrBelow };

/// Response transform phi: identity for standard regression, indicator
/// 1{y <= threshold} for conditional-CDF estimation.
struct ResponseTransform {
  TransformKind kind = TransformKind::Identity;
  double threshold = 0.0;

  double apply(double y) const {
    return kind == TransformKind::Identity ? y
                                           : (y <= threshold ? 1.0 : 0.0);
  }
};

enum class Method { Flc, Fll };

std::string method_name(Method m);
Method method_from_name(const std::string& name);

struct EstimatorConfig {
  Method method = Method::Fll;
  KernelSpec kernel;
  SemimetricSpec d_spec;
  LocatorSpec beta_spec;  // FLL only
  double h = 0.0;
  ResponseTransform transform;
};

struct Prediction {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
  std::size_t active_count = 0;  // points with positive kernel weight
};

// Kernel weight, locator value and transformed response per observation,
// evaluated at one point x. The O(n) estimation paths are pure functions
// of these arrays.
struct LocalTerms {
  std::vector<double> k;     // K(d(chi_i, x) / h)
  std::vector<double> beta;  // beta(chi_i, x), FLL only
  std::vector<double> phi;   // phi(Y_i)
};

LocalTerms compute_local_terms(const Curve& x, const FunctionalSample& sample,
                               const EstimatorConfig& cfg,
                               const PcaBasis& basis);

struct FllSums {
  double s0 = 0.0;  // sum K_i
  double sa = 0.0;  // sum K_i beta_i^2
  double sb = 0.0;  // sum K_j phi_j
  double sc = 0.0;  // sum K_i beta_i
  double sd = 0.0;  // sum K_j beta_j phi_j
};

// Denominators at or below this absolute size are treated as structural
// zeros and yield an Undefined prediction.
inline constexpr double kDenominatorZero = 1e-300;

Prediction flc_from_terms(const LocalTerms& t);
FllSums fll_sums_from_terms(const LocalTerms& t);
Prediction fll_from_sums(const FllSums& s, std::size_t active_count);
Prediction fll_naive_from_terms(const LocalTerms& t);

Prediction flc_estimate(const Curve& x, const FunctionalSample& sample,
                        const EstimatorConfig& cfg, const PcaBasis& basis);

/// Single-pass factorized sums for the local linear estimator.
FllSums fll_sums(const Curve& x, const FunctionalSample& sample,
                 const EstimatorConfig& cfg, const PcaBasis& basis);

/// Local linear estimate via the factorized sums:
///   (Sa*Sb - Sc*Sd) / (Sa*S0 - Sc^2).
Prediction fll_estimate(const Curve& x, const FunctionalSample& sample,
                        const EstimatorConfig& cfg, const PcaBasis& basis);

/// Literal double sum over beta_i (beta_i - beta_j) K_i K_j. Quadratic in n;
/// kept as the oracle the factorized path is tested against.
Prediction fll_estimate_naive(const Curve& x, const FunctionalSample& sample,
                              const EstimatorConfig& cfg,
                              const PcaBasis& basis);

Prediction estimate(const Curve& x, const FunctionalSample& sample,
                    const EstimatorConfig& cfg, const PcaBasis& basis);

// --- leave-one-out cross-validation -------------------------------------

/// Bandwidth candidates are these quantiles of the pairwise semimetric
/// distances, recomputed for each r_d.
struct CvGridSpec {
  std::vector<double> quantiles = {0.05, 0.10, 0.15, 0.20, 0.25,
                                   0.30, 0.35, 0.40, 0.45, 0.50};
};

struct CvRow {
  double h = 0.0;
  std::size_t r_d = 0;
  std::size_t r_beta = 0;  // 0 for FLC
  double score = std::numeric_limits<double>::infinity();
  std::size_t undefined_count = 0;
};

struct CvResult {
  EstimatorConfig best;
  double best_score = std::numeric_limits<double>::infinity();
  std::vector<CvRow> table;
};

/// Leave-one-out CV over (h, r_d[, r_beta]) candidates. The PCA basis is
/// fit once on the full sample at the largest candidate r; each held-out
/// point is predicted with both sums excluding its index. Candidates with
/// any Undefined prediction score +infinity. Ties break toward smaller h,
/// then smaller r_d, then smaller r_beta.
CvResult loo_cv_select(const FunctionalSample& sample, Method method,
                       const KernelSpec& kernel,
                       const ResponseTransform& transform,
                       const CvGridSpec& h_grid,
                       const std::vector<std::size_t>& r_candidates);

void write_cv_table_csv(Method method, const std::vector<CvRow>& table,
                        std::ostream& out);

}  // namespace flreg
