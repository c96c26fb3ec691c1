#include "flreg/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace flreg {

double kl_eigenfunction(std::size_t j, double t) {
  if (j < 1) throw std::invalid_argument("kl_eigenfunction: j >= 1 required");
  const double freq = (static_cast<double>(j) - 0.5) * std::numbers::pi;
  return std::numbers::sqrt2 * std::sin(freq * t);
}

double kl_eigenvalue(std::size_t j) {
  if (j < 1) throw std::invalid_argument("kl_eigenvalue: j >= 1 required");
  const double freq = (static_cast<double>(j) - 0.5) * std::numbers::pi;
  return 1.0 / (freq * freq);
}

WienerDraw sample_wiener(const WienerConfig& cfg, CounterRng& rng) {
  if (!cfg.grid) throw std::invalid_argument("sample_wiener: null grid");
  if (cfg.truncation < 1) {
    throw std::invalid_argument("sample_wiener: truncation >= 1 required");
  }
  const std::size_t J = cfg.truncation;
  std::vector<double> scores(J);
  for (std::size_t j = 0; j < J; ++j) {
    scores[j] = std::sqrt(kl_eigenvalue(j + 1)) * rng.next_normal();
  }
  const auto& pts = cfg.grid->points();
  std::vector<double> values(pts.size(), 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t k = 0; k < pts.size(); ++k) {
      values[k] += kl_eigenfunction(j + 1, pts[k]) * scores[j];
    }
  }
  return {Curve(cfg.grid, std::move(values)), std::move(scores)};
}

std::vector<double> gen_ar1(std::size_t n, double alpha, double var_u,
                            CounterRng& rng) {
  if (!(std::abs(alpha) < 1.0)) {
    throw std::invalid_argument("gen_ar1: |alpha| < 1 required");
  }
  if (var_u < 0.0) {
    throw std::invalid_argument("gen_ar1: negative variance");
  }
  std::vector<double> eps(n);
  if (n == 0) return eps;
  const double sd_u = std::sqrt(var_u);
  eps[0] = std::sqrt(var_u / (1.0 - alpha * alpha)) * rng.next_normal();
  for (std::size_t i = 1; i < n; ++i) {
    eps[i] = alpha * eps[i - 1] + sd_u * rng.next_normal();
  }
  return eps;
}

DgpDraw gen_dgp(const DgpConfig& cfg, CounterRng& rng) {
  if (cfg.response == DgpResponse::SqrtFirstTwoScores &&
      cfg.wiener.truncation < 2) {
    throw std::invalid_argument("gen_dgp: need at least 2 KL terms");
  }
  std::vector<Curve> curves;
  curves.reserve(cfg.n);
  std::vector<double> true_m(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto draw = sample_wiener(cfg.wiener, rng);
    if (cfg.response == DgpResponse::Constant) {
      true_m[i] = cfg.constant_value;
    } else {
      true_m[i] = std::sqrt(std::abs(draw.scores[0] + draw.scores[1]));
    }
    curves.push_back(std::move(draw.curve));
  }
  const auto eps = gen_ar1(cfg.n, cfg.ar_alpha, cfg.u_variance, rng);
  std::vector<double> responses(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) responses[i] = true_m[i] + eps[i];
  return {FunctionalSample(std::move(curves), std::move(responses)),
          std::move(true_m)};
}

namespace {

McReplicate run_one_replicate(const DgpConfig& dgp, std::size_t rep,
                              const McMethodSpec& spec) {
  DgpConfig cfg = dgp;
  CounterRng rng = CounterRng(dgp.seed).substream(rep);
  const DgpDraw draw = gen_dgp(cfg, rng);

  McReplicate out;
  out.index = rep;
  CvResult cv;
  try {
    cv = loo_cv_select(draw.sample, spec.method, spec.kernel,
                       ResponseTransform{}, spec.h_grid, spec.r_candidates);
  } catch (const NoValidCandidateError&) {
    out.failed = true;
    return out;
  }
  out.h = cv.best.h;
  out.r_d = cv.best.d_spec.r;
  out.r_beta = spec.method == Method::Fll ? cv.best.beta_spec.r : 0;

  const std::size_t r_fit =
      std::max(cv.best.d_spec.r,
               spec.method == Method::Fll ? cv.best.beta_spec.r
                                          : std::size_t{1});
  const PcaBasis basis = fit_pca_basis(draw.sample, r_fit);

  const std::size_t n = draw.sample.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Prediction p =
        estimate(draw.sample.curves()[i], draw.sample, cv.best, basis);
    if (!p.defined) {  // cannot happen for CV-validated h, but stay honest
      out.failed = true;
      return out;
    }
    const double e = p.value - draw.true_m[i];
    total += e * e;
  }
  out.mspe = total / static_cast<double>(n);
  return out;
}

}  // namespace

McResult run_monte_carlo(const DgpConfig& dgp, std::size_t n_r,
                         const std::vector<McMethodSpec>& estimators,
                         std::size_t threads) {
  if (n_r < 1) throw std::invalid_argument("run_monte_carlo: n_r >= 1");
  McResult result;
  result.series.resize(estimators.size());
  for (std::size_t s = 0; s < estimators.size(); ++s) {
    result.series[s].method = estimators[s].method;
    result.series[s].replicates.resize(n_r);
  }

  // Work items are (replicate, estimator) pairs keyed by index; each
  // replicate owns its RNG substream, so scheduling cannot change results.
  const std::size_t total = n_r * estimators.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t item = next.fetch_add(1);
      if (item >= total) break;
      const std::size_t rep = item / estimators.size();
      const std::size_t s = item % estimators.size();
      result.series[s].replicates[rep] =
          run_one_replicate(dgp, rep, estimators[s]);
    }
  };

  const std::size_t nthreads = std::max<std::size_t>(1, threads);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  return m % 2 ? values[m / 2]
               : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

RateReport rate_check(const std::vector<std::size_t>& n_list,
                      const DgpConfig& dgp_template,
                      const McMethodSpec& method, std::size_t n_r,
                      std::size_t threads) {
  if (n_list.size() < 3) {
    throw std::invalid_argument("rate_check: need at least 3 sizes");
  }
  RateReport rep;
  rep.n_values = n_list;
  for (std::size_t n : n_list) {
    DgpConfig cfg = dgp_template;
    cfg.n = n;
    const McResult mc = run_monte_carlo(cfg, n_r, {method}, threads);
    std::vector<double> mspes;
    for (const auto& r : mc.series[0].replicates) {
      if (!r.failed) mspes.push_back(r.mspe);
    }
    rep.median_mspe.push_back(median(mspes));
  }

  rep.near_zero = std::all_of(rep.median_mspe.begin(), rep.median_mspe.end(),
                              [](double v) { return v < 1e-8; });
  if (!rep.near_zero) {
    // Least squares of log(mspe) on log(n).
    const std::size_t m = n_list.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double x = std::log(static_cast<double>(n_list[i]));
      const double y = std::log(rep.median_mspe[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return rep;
}

}  // namespace flreg
