#include "flreg/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace flreg {

std::string method_name(Method m) {
  return m == Method::Flc ? "FLC" : "FLL";
}

Method method_from_name(const std::string& name) {
  if (name == "FLC" || name == "flc") return Method::Flc;
  if (name == "FLL" || name == "fll") return Method::Fll;
  throw std::invalid_argument("unknown method: " + name);
}

LocalTerms compute_local_terms(const Curve& x, const FunctionalSample& sample,
                               const EstimatorConfig& cfg,
                               const PcaBasis& basis) {
  if (!(cfg.h > 0.0)) {
    throw std::invalid_argument("estimator: bandwidth must be positive");
  }
  const std::size_t n = sample.size();
  const bool fll = cfg.method == Method::Fll;

  // Project everything once; distances and locators are score arithmetic.
  const bool pca_d = cfg.d_spec.kind == SemimetricKind::Pca;
  std::size_t r_needed = pca_d ? cfg.d_spec.r : 0;
  if (fll) r_needed = std::max(r_needed, cfg.beta_spec.r);
  if (r_needed > basis.r()) {
    throw std::invalid_argument("estimator: r exceeds fitted basis size");
  }
  const auto x_scores = pca_scores(x, basis, r_needed);

  LocalTerms t;
  t.k.resize(n);
  if (fll) t.beta.resize(n);
  t.phi.resize(n);

  std::vector<double> si(r_needed);
  for (std::size_t i = 0; i < n; ++i) {
    const Curve& ci = sample.curves()[i];
    const bool same = ci.values() == x.values();
    for (std::size_t k = 0; k < r_needed; ++k) {
      si[k] = project(ci, basis.eigenfunctions[k]);
    }
    double d;
    if (pca_d) {
      double acc = 0.0;
      for (std::size_t k = 0; k < cfg.d_spec.r; ++k) {
        const double diff = si[k] - x_scores[k];
        acc += diff * diff;
      }
      d = same ? 0.0 : std::sqrt(acc);
    } else {
      d = l2_distance(ci, x);
    }
    t.k[i] = kernel_eval(cfg.kernel, d / cfg.h);
    if (fll) {
      if (same) {
        t.beta[i] = 0.0;
      } else if (cfg.beta_spec.kind == LocatorKind::SignedFirstScore) {
        t.beta[i] = si[0] - x_scores[0];
      } else {
        double acc = 0.0;
        for (std::size_t k = 0; k < cfg.beta_spec.r; ++k) {
          const double diff = si[k] - x_scores[k];
          acc += diff * diff;
        }
        t.beta[i] = std::sqrt(acc);
      }
    }
    t.phi[i] = cfg.transform.apply(sample.responses()[i]);
  }
  return t;
}

namespace {
std::size_t count_active(const std::vector<double>& k) {
  std::size_t c = 0;
  for (double v : k) {
    if (v > 0.0) ++c;
  }
  return c;
}
}  // namespace

Prediction flc_from_terms(const LocalTerms& t) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.k.size(); ++i) {
    num += t.k[i] * t.phi[i];
    den += t.k[i];
  }
  Prediction p;
  p.active_count = count_active(t.k);
  if (den > kDenominatorZero) {
    p.value = num / den;
    p.defined = true;
  }
  return p;
}

FllSums fll_sums_from_terms(const LocalTerms& t) {
  FllSums s;
  for (std::size_t i = 0; i < t.k.size(); ++i) {
    const double ki = t.k[i];
    const double bi = t.beta[i];
    s.s0 += ki;
    s.sa += ki * bi * bi;
    s.sb += ki * t.phi[i];
    s.sc += ki * bi;
    s.sd += ki * bi * t.phi[i];
  }
  return s;
}

Prediction fll_from_sums(const FllSums& s, std::size_t active_count) {
  Prediction p;
  p.active_count = active_count;
  const double den = s.sa * s.s0 - s.sc * s.sc;
  if (std::abs(den) > kDenominatorZero) {
    p.value = (s.sa * s.sb - s.sc * s.sd) / den;
    p.defined = true;
  }
  return p;
}

Prediction fll_naive_from_terms(const LocalTerms& t) {
  const std::size_t n = t.k.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ki = t.k[i];
    if (ki == 0.0) continue;
    const double bi = t.beta[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double w = bi * (bi - t.beta[j]) * ki * t.k[j];
      num += w * t.phi[j];
      den += w;
    }
  }
  Prediction p;
  p.active_count = count_active(t.k);
  if (std::abs(den) > kDenominatorZero) {
    p.value = num / den;
    p.defined = true;
  }
  return p;
}

Prediction flc_estimate(const Curve& x, const FunctionalSample& sample,
                        const EstimatorConfig& cfg, const PcaBasis& basis) {
  if (cfg.method != Method::Flc) {
    throw std::invalid_argument("flc_estimate: config method is not FLC");
  }
  return flc_from_terms(compute_local_terms(x, sample, cfg, basis));
}

FllSums fll_sums(const Curve& x, const FunctionalSample& sample,
                 const EstimatorConfig& cfg, const PcaBasis& basis) {
  if (cfg.method != Method::Fll) {
    throw std::invalid_argument("fll_sums: config method is not FLL");
  }
  return fll_sums_from_terms(compute_local_terms(x, sample, cfg, basis));
}

Prediction fll_estimate(const Curve& x, const FunctionalSample& sample,
                        const EstimatorConfig& cfg, const PcaBasis& basis) {
  if (cfg.method != Method::Fll) {
    throw std::invalid_argument("fll_estimate: config method is not FLL");
  }
  const auto t = compute_local_terms(x, sample, cfg, basis);
  return fll_from_sums(fll_sums_from_terms(t), count_active(t.k));
}

Prediction fll_estimate_naive(const Curve& x, const FunctionalSample& sample,
                              const EstimatorConfig& cfg,
                              const PcaBasis& basis) {
  if (cfg.method != Method::Fll) {
    throw std::invalid_argument("fll_estimate_naive: config method is not FLL");
  }
  return fll_naive_from_terms(compute_local_terms(x, sample, cfg, basis));
}

Prediction estimate(const Curve& x, const FunctionalSample& sample,
                    const EstimatorConfig& cfg, const PcaBasis& basis) {
  return cfg.method == Method::Flc ? flc_estimate(x, sample, cfg, basis)
                                   : fll_estimate(x, sample, cfg, basis);
}

// --- leave-one-out cross-validation -------------------------------------

namespace {

// Nearest-rank quantile of a sorted ascending vector, q in (0,1].
double nearest_rank(const std::vector<double>& sorted, double q) {
  const std::size_t m = sorted.size();
  std::size_t idx = static_cast<std::size_t>(std::ceil(q * m));
  if (idx == 0) idx = 1;
  if (idx > m) idx = m;
  return sorted[idx - 1];
}

bool candidate_better(const CvRow& a, const CvRow& b) {
  if (a.score != b.score) return a.score < b.score;
  if (a.h != b.h) return a.h < b.h;
  if (a.r_d != b.r_d) return a.r_d < b.r_d;
  return a.r_beta < b.r_beta;
}

}  // namespace

CvResult loo_cv_select(const FunctionalSample& sample, Method method,
                       const KernelSpec& kernel,
                       const ResponseTransform& transform,
                       const CvGridSpec& h_grid,
                       const std::vector<std::size_t>& r_candidates) {
  const std::size_t n = sample.size();
  if (n < 3) throw std::invalid_argument("loo_cv_select: need n >= 3");
  if (r_candidates.empty()) {
    throw std::invalid_argument("loo_cv_select: no r candidates");
  }
  std::vector<std::size_t> r_cands = r_candidates;
  std::sort(r_cands.begin(), r_cands.end());
  r_cands.erase(std::unique(r_cands.begin(), r_cands.end()), r_cands.end());
  const std::size_t r_max = r_cands.back();
  if (r_cands.front() < 1 || r_max > sample.grid()->size()) {
    throw std::invalid_argument("loo_cv_select: r candidate out of range");
  }

  const PcaBasis basis = fit_pca_basis(sample, r_max);

  std::vector<std::vector<double>> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = pca_scores(sample.curves()[i], basis, r_max);
  }
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = transform.apply(sample.responses()[i]);
  }

  // Squared PCA distances at each candidate truncation, built by
  // accumulating one score component at a time.
  std::map<std::size_t, std::vector<double>> sqd;  // r -> n*n matrix
  {
    std::vector<double> cum(n * n, 0.0);
    std::size_t next = 0;
    for (std::size_t k = 0; k < r_max; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          const double diff = scores[i][k] - scores[j][k];
          cum[i * n + j] += diff * diff;
          cum[j * n + i] = cum[i * n + j];
        }
      }
      while (next < r_cands.size() && r_cands[next] == k + 1) {
        sqd[r_cands[next]] = cum;
        ++next;
      }
    }
  }

  // Per-r_d bandwidth candidates: quantiles of the pairwise distances.
  std::map<std::size_t, std::vector<double>> h_cands;
  for (std::size_t r : r_cands) {
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    const auto& m = sqd[r];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        dists.push_back(std::sqrt(m[i * n + j]));
      }
    }
    std::sort(dists.begin(), dists.end());
    std::vector<double> hs;
    hs.reserve(h_grid.quantiles.size());
    for (double q : h_grid.quantiles) hs.push_back(nearest_rank(dists, q));
    h_cands[r] = std::move(hs);
  }

  const KernelSpec kspec = kernel;
  const double inf = std::numeric_limits<double>::infinity();

  auto score_flc = [&](double h, std::size_t r_d, CvRow& row) {
    const auto& m = sqd[r_d];
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        const double ki = kernel_eval(kspec, std::sqrt(m[k * n + i]) / h);
        num += ki * phi[i];
        den += ki;
      }
      if (den > kDenominatorZero) {
        const double e = phi[k] - num / den;
        total += e * e;
      } else {
        ++row.undefined_count;
      }
    }
    row.score = row.undefined_count ? inf : total / static_cast<double>(n);
  };

  auto score_fll = [&](double h, std::size_t r_d, std::size_t r_b,
                       CvRow& row) {
    const auto& md = sqd[r_d];
    const auto& mb = sqd[r_b];
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      FllSums s;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == k) continue;
        const double ki = kernel_eval(kspec, std::sqrt(md[k * n + i]) / h);
        if (ki == 0.0) continue;
        const double bi = std::sqrt(mb[k * n + i]);
        s.s0 += ki;
        s.sa += ki * bi * bi;
        s.sb += ki * phi[i];
        s.sc += ki * bi;
        s.sd += ki * bi * phi[i];
      }
      const double den = s.sa * s.s0 - s.sc * s.sc;
      if (std::abs(den) > kDenominatorZero) {
        const double e = phi[k] - (s.sa * s.sb - s.sc * s.sd) / den;
        total += e * e;
      } else {
        ++row.undefined_count;
      }
    }
    row.score = row.undefined_count ? inf : total / static_cast<double>(n);
  };

  CvResult result;
  for (std::size_t r_d : r_cands) {
    for (double h : h_cands[r_d]) {
      if (method == Method::Flc) {
        CvRow row{h, r_d, 0, inf, 0};
        if (h > 0.0) {
          score_flc(h, r_d, row);
        } else {
          row.undefined_count = n;
        }
        result.table.push_back(row);
      } else {
        for (std::size_t r_b : r_cands) {
          CvRow row{h, r_d, r_b, inf, 0};
          if (h > 0.0) {
            score_fll(h, r_d, r_b, row);
          } else {
            row.undefined_count = n;
          }
          result.table.push_back(row);
        }
      }
    }
  }

  const CvRow* best = nullptr;
  for (const auto& row : result.table) {
    if (!std::isfinite(row.score)) continue;
    if (!best || candidate_better(row, *best)) best = &row;
  }
  if (!best) {
    throw NoValidCandidateError(
        "loo_cv_select: every candidate produced undefined predictions");
  }

  result.best_score = best->score;
  result.best.method = method;
  result.best.kernel = kernel;
  result.best.transform = transform;
  result.best.h = best->h;
  result.best.d_spec = {SemimetricKind::Pca, best->r_d};
  result.best.beta_spec = {LocatorKind::PcaDistance,
                           best->r_beta ? best->r_beta : std::size_t{1}};
  return result;
}

void write_cv_table_csv(Method method, const std::vector<CvRow>& table,
                        std::ostream& out) {
  out << "method,h,r_d,r_beta,cv_score,undefined_count\n";
  for (const auto& row : table) {
    out << method_name(method) << ',' << format_double(row.h) << ','
        << row.r_d << ',' << row.r_beta << ',' << format_double(row.score)
        << ',' << row.undefined_count << '\n';
  }
}

}  // namespace flreg
