#include "flreg/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace flreg {

std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

std::string civil_date_string(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                static_cast<long long>(y + (m <= 2)), m, d);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_timestamp(const std::string& s, std::int64_t& day, int& hour) {
  int y, mo, d, h, mi, se;
  if (std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%d", &y, &mo, &d, &h, &mi,
                  &se) != 6) {
    return false;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23) return false;
  day = days_from_civil(y, mo, d);
  hour = h;
  return true;
}

}  // namespace

IngestResult ingest_hourly_csv(std::istream& in, const IngestOptions& opts) {
  std::string line;
  if (!std::getline(in, line)) {
    throw IngestError("ingest_hourly_csv: empty input");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  std::ptrdiff_t dt_col = -1, load_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == opts.datetime_column) dt_col = i;
    if (header[i] == opts.load_column) load_col = i;
  }
  if (dt_col < 0 || load_col < 0) {
    throw IngestError("ingest_hourly_csv: required columns not found");
  }

  IngestResult result;
  // key = day*24 + hour -> (sum, count) for duplicate averaging
  std::map<std::int64_t, std::pair<double, std::size_t>> acc;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (static_cast<std::ptrdiff_t>(cells.size()) <=
        std::max(dt_col, load_col)) {
      ++result.unparseable_rows;
      continue;
    }
    std::int64_t day;
    int hour;
    double load;
    try {
      load = std::stod(cells[load_col]);
    } catch (...) {
      ++result.unparseable_rows;
      continue;
    }
    if (!parse_timestamp(cells[dt_col], day, hour)) {
      ++result.unparseable_rows;
      continue;
    }
    if (!(load > 0.0) || !std::isfinite(load)) {
      ++result.rejected_nonpositive;
      continue;
    }
    auto& slot = acc[day * 24 + hour];
    if (slot.second > 0) ++result.duplicates_merged;
    slot.first += load;
    slot.second += 1;
  }

  result.records.reserve(acc.size());
  for (const auto& [key, sum_count] : acc) {
    HourlyRecord rec;
    rec.day = key / 24;
    rec.hour = static_cast<int>(key % 24);
    rec.load = sum_count.first / static_cast<double>(sum_count.second);
    result.records.push_back(rec);
  }
  return result;
}

IngestResult ingest_hourly_csv(const std::string& path,
                               const IngestOptions& opts) {
  std::ifstream f(path);
  if (!f) throw IngestError("cannot open: " + path);
  return ingest_hourly_csv(f, opts);
}

DailyDataset build_daily_dataset(const std::vector<HourlyRecord>& records) {
  std::map<std::int64_t, std::vector<double>> days;  // day -> loads by hour
  for (const auto& rec : records) {
    auto& loads = days[rec.day];
    if (loads.empty()) loads.assign(24, -1.0);
    loads[rec.hour] = rec.load;
  }

  std::map<std::int64_t, std::vector<double>> complete;
  std::size_t dropped = 0;
  for (auto& [day, loads] : days) {
    const bool full = std::all_of(loads.begin(), loads.end(),
                                  [](double v) { return v > 0.0; });
    if (full) {
      complete.emplace(day, std::move(loads));
    } else {
      ++dropped;
    }
  }

  static const GridPtr grid24 = make_uniform_grid(24);
  DailyDataset data;
  data.dropped_days = dropped;
  for (auto it = complete.begin(); it != complete.end(); ++it) {
    const auto next = complete.find(it->first + 1);
    if (next == complete.end()) continue;
    std::vector<double> log_loads(24);
    for (int h = 0; h < 24; ++h) log_loads[h] = std::log(it->second[h]);
    double next_total = 0.0;
    for (double v : next->second) next_total += v;
    data.dates.push_back(it->first);
    data.curves.emplace_back(grid24, std::move(log_loads));
    data.responses.push_back(std::log(next_total));
  }
  if (data.size() < 1) {
    throw DatasetError("build_daily_dataset: fewer than 2 usable consecutive days");
  }
  return data;
}

void RollingResult::defined_losses(std::vector<double>& flc,
                                   std::vector<double>& fll) const {
  flc.clear();
  fll.clear();
  for (const auto& row : rows) {
    if (row.defined_flc && row.defined_fll) {
      flc.push_back(row.loss_flc);
      fll.push_back(row.loss_fll);
    }
  }
}

RollingResult rolling_forecast(const DailyDataset& data,
                               const RollingConfig& cfg) {
  const std::size_t t_pairs = data.size();
  const std::size_t w = cfg.window;
  if (w < 10) throw std::invalid_argument("rolling_forecast: W >= 10 required");
  if (w >= t_pairs) {
    throw std::invalid_argument("rolling_forecast: W must be < pair count");
  }
  const std::size_t cv_refresh = std::max<std::size_t>(1, cfg.cv_refresh);

  RollingResult result;
  result.rows.reserve(t_pairs - w);

  EstimatorConfig cfg_flc, cfg_fll;
  bool tuned = false;

  for (std::size_t t = w; t < t_pairs; ++t) {
    // Training window: the W pairs immediately before the target.
    std::vector<Curve> curves(data.curves.begin() + (t - w),
                              data.curves.begin() + t);
    std::vector<double> responses(data.responses.begin() + (t - w),
                                  data.responses.begin() + t);
    FunctionalSample window(std::move(curves), std::move(responses));

    if (!tuned || (t - w) % cv_refresh == 0) {
      cfg_flc = loo_cv_select(window, Method::Flc, cfg.kernel,
                              ResponseTransform{}, cfg.h_grid,
                              cfg.r_candidates)
                    .best;
      cfg_fll = loo_cv_select(window, Method::Fll, cfg.kernel,
                              ResponseTransform{}, cfg.h_grid,
                              cfg.r_candidates)
                    .best;
      tuned = true;
    }

    const std::size_t r_fit = std::max(
        {cfg_flc.d_spec.r, cfg_fll.d_spec.r, cfg_fll.beta_spec.r});
    const PcaBasis basis = fit_pca_basis(window, r_fit);

    const Curve& x = data.curves[t];
    const double y = data.responses[t];
    const Prediction p_flc = flc_estimate(x, window, cfg_flc, basis);
    const Prediction p_fll = fll_estimate(x, window, cfg_fll, basis);

    ForecastRow row;
    row.target_date = data.dates[t] + 1;  // response day of pair t
    row.y = y;
    row.defined_flc = p_flc.defined;
    row.defined_fll = p_fll.defined;
    if (p_flc.defined) {
      row.yhat_flc = p_flc.value;
      row.loss_flc = (p_flc.value - y) * (p_flc.value - y);
    }
    if (p_fll.defined) {
      row.yhat_fll = p_fll.value;
      row.loss_fll = (p_fll.value - y) * (p_fll.value - y);
    }
    if (!p_flc.defined || !p_fll.defined) ++result.undefined_count;
    result.rows.push_back(row);
  }
  return result;
}

CsfeSeries csfe(const std::vector<double>& loss_flc,
                const std::vector<double>& loss_fll) {
  if (loss_flc.size() != loss_fll.size()) {
    throw std::invalid_argument("csfe: length mismatch");
  }
  if (loss_flc.empty()) {
    throw std::invalid_argument("csfe: empty series");
  }
  CsfeSeries series;
  series.indices.resize(loss_flc.size());
  series.values.resize(loss_flc.size());
  double running = 0.0;
  for (std::size_t i = 0; i < loss_flc.size(); ++i) {
    running += loss_flc[i] - loss_fll[i];
    series.indices[i] = i;
    series.values[i] = running;
  }
  return series;
}

GwResult gw_test(const std::vector<double>& loss_fll,
                 const std::vector<double>& loss_flc) {
  if (loss_fll.size() != loss_flc.size()) {
    throw std::invalid_argument("gw_test: length mismatch");
  }
  const std::size_t n = loss_fll.size();
  if (n < 10) throw std::invalid_argument("gw_test: need n >= 10");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = loss_flc[i] - loss_fll[i];

  // Instrumented moments Z_t = (d_t, d_{t-1} d_t), t = 1..n-1.
  const std::size_t m = n - 1;
  double z0 = 0.0, z1 = 0.0;
  double o00 = 0.0, o01 = 0.0, o11 = 0.0;
  for (std::size_t t = 1; t < n; ++t) {
    const double a = d[t];
    const double b = d[t - 1] * d[t];
    z0 += a;
    z1 += b;
    o00 += a * a;
    o01 += a * b;
    o11 += b * b;
  }
  const double mf = static_cast<double>(m);
  z0 /= mf;
  z1 /= mf;
  o00 /= mf;
  o01 /= mf;
  o11 /= mf;

  GwResult res;
  res.n_used = m;
  res.mean_loss_diff = z0;

  const double det = o00 * o11 - o01 * o01;
  const double scale = std::max({o00, o11, 1e-30});
  if (!(det > 1e-14 * scale * scale)) {
    res.degenerate = true;
    res.statistic = 0.0;
    res.p_value = 1.0;
    return res;
  }
  // stat = m * zbar' Omega^{-1} zbar
  const double q =
      (o11 * z0 * z0 - 2.0 * o01 * z0 * z1 + o00 * z1 * z1) / det;
  res.statistic = mf * q;
  res.p_value = std::exp(-0.5 * res.statistic);  // chi-square, 2 df
  return res;
}

void write_forecast_csv(const RollingResult& result, std::ostream& out) {
  out << "date,y,yhat_flc,yhat_fll,loss_flc,loss_fll\n";
  for (const auto& row : result.rows) {
    out << civil_date_string(row.target_date) << ',' << format_double(row.y)
        << ',' << (row.defined_flc ? format_double(row.yhat_flc) : "NA")
        << ',' << (row.defined_fll ? format_double(row.yhat_fll) : "NA")
        << ',' << (row.defined_flc ? format_double(row.loss_flc) : "NA")
        << ',' << (row.defined_fll ? format_double(row.loss_fll) : "NA")
        << '\n';
  }
}

void write_csfe_csv(const CsfeSeries& series,
                    const std::vector<std::int64_t>& dates,
                    std::ostream& out) {
  out << "index,date,csfe\n";
  for (std::size_t i = 0; i < series.values.size(); ++i) {
    out << series.indices[i] << ',';
    if (i < dates.size()) {
      out << civil_date_string(dates[i]);
    }
    out << ',' << format_double(series.values[i]) << '\n';
  }
}

}  // namespace flreg
