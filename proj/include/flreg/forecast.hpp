#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "flreg/estimator.hpp"
#include "flreg/grid.hpp"

namespace flreg {

struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DatasetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Calendar helpers (proleptic Gregorian, days since 1970-01-01).
std::int64_t days_from_civil(int year, int month, int day);
std::string civil_date_string(std::int64_t day_serial);

struct HourlyRecord {
  std::int64_t day = 0;  // day serial
  int hour = 0;          // 0..23
  double load = 0.0;     // MW, strictly positive
};

struct IngestResult {
  std::vector<HourlyRecord> records;  // sorted, duplicates averaged
  std::size_t rejected_nonpositive = 0;
  std::size_t unparseable_rows = 0;
  std::size_t duplicates_merged = 0;
};

struct IngestOptions {
  std::string datetime_column = "Datetime";
  std::string load_column = "AEP_MW";
};

/// Parses an hourly load CSV ("Datetime,AEP_MW" by default, timestamps
/// "YYYY-MM-DD HH:MM:SS"). Rows with nonpositive load are rejected and
/// counted; duplicate timestamps (DST folds) are averaged.
IngestResult ingest_hourly_csv(std::istream& in,
                               const IngestOptions& opts = {});
IngestResult ingest_hourly_csv(const std::string& path,
                               const IngestOptions& opts = {});

/// Daily covariate/response pairs: log hourly loads of day d against the
/// log of day d+1's total load. Only calendar-consecutive complete days
/// (exactly 24 hourly values each) form a pair.
struct DailyDataset {
  std::vector<std::int64_t> dates;  // covariate day per pair
  std::vector<Curve> curves;        // 24-point log-load curves
  std::vector<double> responses;    // log of next-day total load
  std::size_t dropped_days = 0;     // days lacking exactly 24 values

  std::size_t size() const { return curves.size(); }
};

DailyDataset build_daily_dataset(const std::vector<HourlyRecord>& records);

struct RollingConfig {
  std::size_t window = 1081;
  std::size_t cv_refresh = 250;  // origins between CV re-selections
  KernelSpec kernel;
  std::vector<std::size_t> r_candidates = {1, 2, 3, 4, 5, 6};
  CvGridSpec h_grid;
};

struct ForecastRow {
  std::int64_t target_date = 0;
  double y = 0.0;
  double yhat_flc = 0.0;
  double yhat_fll = 0.0;
  bool defined_flc = false;
  bool defined_fll = false;
  double loss_flc = 0.0;
  double loss_fll = 0.0;
};

struct RollingResult {
  std::vector<ForecastRow> rows;       // one per forecast origin, in order
  std::size_t undefined_count = 0;     // rows with either method undefined

  /// Losses of rows where both methods produced a defined forecast.
  void defined_losses(std::vector<double>& flc,
                      std::vector<double>& fll) const;
};

/// One-step-ahead rolling forecasts: for each target t in [W, T), both
/// estimators are trained on the W preceding pairs (PCA basis refit on the
/// window, CV re-run every cv_refresh origins) and predict the response of
/// pair t from its covariate curve. Emits exactly T - W rows.
RollingResult rolling_forecast(const DailyDataset& data,
                               const RollingConfig& cfg);

struct CsfeSeries {
  std::vector<std::size_t> indices;
  std::vector<double> values;  // running sum of loss_flc - loss_fll
};

CsfeSeries csfe(const std::vector<double>& loss_flc,
                const std::vector<double>& loss_fll);

struct GwResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 2;
  double p_value = 1.0;
  double mean_loss_diff = 0.0;  // positive favors FLL
  bool degenerate = false;
  std::size_t n_used = 0;
};

/// Giacomini-White conditional predictive ability test at horizon one with
/// instruments (1, lagged loss differential). The chi-square statistic is
/// two-sided; callers reject in favor of FLL only when mean_loss_diff > 0.
GwResult gw_test(const std::vector<double>& loss_fll,
                 const std::vector<double>& loss_flc);

void write_forecast_csv(const RollingResult& result, std::ostream& out);
void write_csfe_csv(const CsfeSeries& series,
                    const std::vector<std::int64_t>& dates, std::ostream& out);

}  // namespace flreg
