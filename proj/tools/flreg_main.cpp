// flreg: command line driver for the functional kernel regression library.
//
// Subcommands: simulate | forecast | cv | ratecheck | diagnose.
// Each takes a JSON config (--config), an output directory (--out) and
// optional --seed / --threads overrides. Artifacts embed the seed and a
// hash of the effective config so runs can be audited.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flreg/diagnostics.hpp"
#include "flreg/estimator.hpp"
#include "flreg/forecast.hpp"
#include "flreg/simulate.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace flreg;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!cfg.is_object()) throw ConfigError("config root must be an object");
  return cfg;
}

void reject_unknown_keys(const json& cfg,
                         const std::set<std::string>& allowed) {
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    if (!allowed.count(it.key())) {
      std::string known;
      for (const auto& k : allowed) {
        if (!known.empty()) known += ", ";
        known += k;
      }
      throw ConfigError("unknown config key \"" + it.key() +
                        "\" (known keys: " + known + ")");
    }
  }
}

double get_number(const json& cfg, const std::string& key, double fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number()) throw ConfigError(key + " must be a number");
  return cfg[key].get<double>();
}

std::size_t get_size(const json& cfg, const std::string& key,
                     std::size_t fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_number_unsigned()) {
    throw ConfigError(key + " must be a nonnegative integer");
  }
  return cfg[key].get<std::size_t>();
}

std::string get_string(const json& cfg, const std::string& key,
                       const std::string& fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_string()) throw ConfigError(key + " must be a string");
  return cfg[key].get<std::string>();
}

std::vector<double> get_doubles(const json& cfg, const std::string& key,
                                std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_array()) throw ConfigError(key + " must be an array");
  std::vector<double> out;
  for (const auto& v : cfg[key]) {
    if (!v.is_number()) throw ConfigError(key + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::vector<std::size_t> get_sizes(const json& cfg, const std::string& key,
                                   std::vector<std::size_t> fallback) {
  if (!cfg.contains(key)) return fallback;
  if (!cfg[key].is_array()) throw ConfigError(key + " must be an array");
  std::vector<std::size_t> out;
  for (const auto& v : cfg[key]) {
    if (!v.is_number_unsigned()) {
      throw ConfigError(key + " must hold nonnegative integers");
    }
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed_override = -1;
  std::int64_t threads_override = -1;
};

// Applies CLI overrides, then freezes the effective config for hashing.
struct RunContext {
  json cfg;
  fs::path out;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string config_hash;

  std::vector<std::string> failed;  // artifacts that could not be written

  RunContext(const CommonArgs& args, const std::set<std::string>& keys) {
    cfg = load_config(args.config_path);
    reject_unknown_keys(cfg, keys);
    if (args.seed_override >= 0) {
      cfg["seed"] = static_cast<std::uint64_t>(args.seed_override);
    }
    if (args.threads_override >= 0) {
      cfg["threads"] = static_cast<std::uint64_t>(args.threads_override);
    }
    seed = get_size(cfg, "seed", 1);
    threads = get_size(cfg, "threads", 1);
    if (threads == 0) {
      threads = std::max(1u, std::thread::hardware_concurrency());
    }
    // The hash covers everything that influences the artifacts; the thread
    // count does not (results are bitwise thread-invariant), so drop it.
    json hashed = cfg;
    hashed.erase("threads");
    config_hash = fnv1a_hex(hashed.dump());
    out = fs::path(args.out_dir);
    fs::create_directories(out);
  }

  std::string stamp() const {
    return "# seed=" + std::to_string(seed) + " config=" + config_hash + "\n";
  }

  void write_text(const std::string& name, const std::string& body) {
    const fs::path path = out / name;
    std::ofstream f(path, std::ios::binary);
    if (f) f << body;
    if (!f) {
      failed.push_back(path.string());
      std::cerr << "error: failed to write " << path.string() << "\n";
    }
  }

  void write_json(const std::string& name, json doc) {
    doc["seed"] = seed;
    doc["config_hash"] = config_hash;
    write_text(name, doc.dump(2) + "\n");
  }

  int finish() const { return failed.empty() ? 0 : 1; }
};

KernelSpec kernel_from_config(const json& cfg) {
  KernelSpec spec;
  spec.kind = kernel_from_name(get_string(cfg, "kernel", "quadratic"));
  return spec;
}

CvGridSpec h_grid_from_config(const json& cfg) {
  CvGridSpec grid;
  grid.quantiles = get_doubles(cfg, "h_quantiles", grid.quantiles);
  return grid;
}

std::vector<std::size_t> r_candidates_from_config(const json& cfg) {
  auto r = get_sizes(cfg, "r_candidates", {1, 2, 3, 4, 5, 6});
  if (r.empty()) throw ConfigError("r_candidates must not be empty");
  return r;
}

DgpConfig dgp_from_config(const json& cfg, std::uint64_t seed) {
  DgpConfig dgp;
  dgp.n = get_size(cfg, "n", 100);
  dgp.u_variance = get_number(cfg, "u_variance", 0.01);
  dgp.wiener.truncation = get_size(cfg, "truncation", 100);
  dgp.wiener.grid = make_uniform_grid(get_size(cfg, "grid_points", 100));
  dgp.seed = seed;
  return dgp;
}

double nearest_rank(std::vector<double> sorted_values, double q) {
  const std::size_t n = sorted_values.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * n));
  if (rank == 0) rank = 1;
  if (rank > n) rank = n;
  return sorted_values[rank - 1];
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
  RunContext ctx(args,
                 {"n", "n_r", "alphas", "u_variance", "truncation",
                  "grid_points", "kernel", "r_candidates", "h_quantiles",
                  "seed", "threads"});
  const auto n_r = get_size(ctx.cfg, "n_r", 250);
  const auto alphas =
      get_doubles(ctx.cfg, "alphas", {0.0, 1.0 / 3.0, 2.0 / 3.0});
  if (n_r == 0) throw ConfigError("n_r must be positive");
  if (alphas.empty()) throw ConfigError("alphas must not be empty");

  McMethodSpec flc, fll;
  flc.method = Method::Flc;
  fll.method = Method::Fll;
  flc.kernel = fll.kernel = kernel_from_config(ctx.cfg);
  flc.r_candidates = fll.r_candidates = r_candidates_from_config(ctx.cfg);
  flc.h_grid = fll.h_grid = h_grid_from_config(ctx.cfg);

  std::ostringstream csv;
  csv << ctx.stamp() << "replicate,estimator,alpha,h,r_d,r_beta,mspe\n";
  json summary;
  summary["entries"] = json::array();

  for (double alpha : alphas) {
    DgpConfig dgp = dgp_from_config(ctx.cfg, ctx.seed);
    dgp.ar_alpha = alpha;
    auto result = run_monte_carlo(dgp, n_r, {flc, fll}, ctx.threads);

    for (const auto& series : result.series) {
      std::vector<double> mspes;
      std::size_t failures = 0;
      for (const auto& rep : series.replicates) {
        if (rep.failed) {
          ++failures;
          continue;
        }
        csv << rep.index << ',' << method_name(series.method) << ','
            << format_double(alpha) << ',' << format_double(rep.h) << ','
            << rep.r_d << ',' << rep.r_beta << ','
            << format_double(rep.mspe) << '\n';
        mspes.push_back(rep.mspe);
      }
      json entry;
      entry["alpha"] = alpha;
      entry["estimator"] = method_name(series.method);
      entry["replicates"] = mspes.size();
      entry["failed_replicates"] = failures;
      if (!mspes.empty()) {
        std::vector<double> sorted = mspes;
        std::sort(sorted.begin(), sorted.end());
        entry["median_mspe"] = median(mspes);
        entry["iqr"] =
            nearest_rank(sorted, 0.75) - nearest_rank(sorted, 0.25);
      }
      summary["entries"].push_back(entry);
    }
  }

  ctx.write_text("simulation.csv", csv.str());
  ctx.write_json("simulation_summary.json", summary);
  return ctx.finish();
}

// --- forecast ---------------------------------------------------------------

int cmd_forecast(const CommonArgs& args) {
  RunContext ctx(args, {"input", "datetime_column", "load_column", "window",
                        "cv_refresh", "kernel", "r_candidates", "h_quantiles",
                        "seed", "threads"});
  const auto input = get_string(ctx.cfg, "input", "");
  if (input.empty()) throw ConfigError("forecast requires \"input\"");

  IngestOptions opts;
  opts.datetime_column = get_string(ctx.cfg, "datetime_column", "Datetime");
  opts.load_column = get_string(ctx.cfg, "load_column", "AEP_MW");
  auto ingest = ingest_hourly_csv(input, opts);
  std::cout << "ingest: " << ingest.records.size() << " records, "
            << ingest.rejected_nonpositive << " nonpositive rejected, "
            << ingest.unparseable_rows << " unparseable, "
            << ingest.duplicates_merged << " duplicates merged\n";

  auto data = build_daily_dataset(ingest.records);
  std::cout << "dataset: " << data.size() << " pairs, " << data.dropped_days
            << " incomplete days dropped\n";

  RollingConfig cfg;
  cfg.window = get_size(ctx.cfg, "window", cfg.window);
  cfg.cv_refresh = get_size(ctx.cfg, "cv_refresh", cfg.cv_refresh);
  cfg.kernel = kernel_from_config(ctx.cfg);
  cfg.r_candidates = r_candidates_from_config(ctx.cfg);
  cfg.h_grid = h_grid_from_config(ctx.cfg);

  auto result = rolling_forecast(data, cfg);
  std::cout << "forecast: T=" << data.size() << " W=" << cfg.window
            << " T_out=" << data.size() - cfg.window << " ("
            << result.undefined_count << " undefined)\n";

  std::ostringstream fcsv;
  fcsv << ctx.stamp();
  write_forecast_csv(result, fcsv);
  ctx.write_text("forecasts.csv", fcsv.str());

  std::vector<double> loss_flc, loss_fll;
  result.defined_losses(loss_flc, loss_fll);
  std::vector<std::int64_t> dates;
  for (const auto& row : result.rows) {
    if (row.defined_flc && row.defined_fll) dates.push_back(row.target_date);
  }
  auto series = csfe(loss_flc, loss_fll);
  std::ostringstream ccsv;
  ccsv << ctx.stamp();
  write_csfe_csv(series, dates, ccsv);
  ctx.write_text("csfe.csv", ccsv.str());

  auto gw = gw_test(loss_fll, loss_flc);
  json doc;
  doc["statistic"] = gw.statistic;
  doc["df"] = gw.degrees_of_freedom;
  doc["p_value"] = gw.p_value;
  doc["mean_loss_diff"] = gw.mean_loss_diff;
  doc["n"] = gw.n_used;
  doc["degenerate"] = gw.degenerate;
  ctx.write_json("gw.json", doc);
  return ctx.finish();
}

// --- cv ---------------------------------------------------------------------

int cmd_cv(const CommonArgs& args) {
  RunContext ctx(args, {"input", "method", "kernel", "r_candidates",
                        "h_quantiles", "seed", "threads"});
  const auto input = get_string(ctx.cfg, "input", "");
  if (input.empty()) throw ConfigError("cv requires \"input\"");
  auto sample = read_sample_csv(input);

  const Method method =
      method_from_name(get_string(ctx.cfg, "method", "fll"));
  auto cv = loo_cv_select(sample, method, kernel_from_config(ctx.cfg), {},
                          h_grid_from_config(ctx.cfg),
                          r_candidates_from_config(ctx.cfg));

  std::ostringstream csv;
  csv << ctx.stamp();
  write_cv_table_csv(method, cv.table, csv);
  ctx.write_text("cv_table.csv", csv.str());

  json doc;
  doc["method"] = method_name(method);
  doc["kernel"] = kernel_name(cv.best.kernel.kind);
  doc["h"] = cv.best.h;
  doc["r_d"] = cv.best.d_spec.r;
  doc["r_beta"] = cv.best.beta_spec.r;
  doc["score"] = cv.best_score;
  ctx.write_json("cv_selected.json", doc);
  return ctx.finish();
}

// --- ratecheck ----------------------------------------------------------------

int cmd_ratecheck(const CommonArgs& args) {
  RunContext ctx(args,
                 {"n_values", "n_r", "alphas", "u_variance", "truncation",
                  "grid_points", "method", "kernel", "r_candidates",
                  "h_quantiles", "seed", "threads"});
  const auto n_values =
      get_sizes(ctx.cfg, "n_values", {50, 100, 200, 400});
  if (n_values.size() < 3) {
    throw ConfigError("n_values needs at least 3 sample sizes");
  }
  const auto n_r = get_size(ctx.cfg, "n_r", 25);
  const auto alphas = get_doubles(ctx.cfg, "alphas", {0.0});

  McMethodSpec method;
  method.method = method_from_name(get_string(ctx.cfg, "method", "fll"));
  method.kernel = kernel_from_config(ctx.cfg);
  method.r_candidates = r_candidates_from_config(ctx.cfg);
  method.h_grid = h_grid_from_config(ctx.cfg);

  json doc;
  doc["method"] = method_name(method.method);
  doc["reports"] = json::array();
  for (double alpha : alphas) {
    DgpConfig dgp = dgp_from_config(ctx.cfg, ctx.seed);
    dgp.ar_alpha = alpha;
    auto report = rate_check(n_values, dgp, method, n_r, ctx.threads);
    json entry;
    entry["alpha"] = alpha;
    entry["n_values"] = report.n_values;
    entry["median_mspe"] = report.median_mspe;
    entry["slope"] = report.slope;
    entry["near_zero"] = report.near_zero;
    doc["reports"].push_back(entry);
  }
  ctx.write_json("ratecheck.json", doc);
  return ctx.finish();
}

// --- diagnose ----------------------------------------------------------------

int cmd_diagnose(const CommonArgs& args) {
  RunContext ctx(args, {"input", "r", "center_index", "quantiles", "seed",
                        "threads"});
  const auto input = get_string(ctx.cfg, "input", "");
  if (input.empty()) throw ConfigError("diagnose requires \"input\"");
  auto sample = read_sample_csv(input);

  SemimetricSpec spec;
  spec.kind = SemimetricKind::Pca;
  spec.r = get_size(ctx.cfg, "r", 2);
  auto basis = fit_pca_basis(sample, spec.r);

  auto q_list = get_doubles(ctx.cfg, "quantiles",
                            {0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40,
                             0.45, 0.50});
  auto quantiles = distance_quantiles(sample, spec, basis, q_list);
  json doc;
  doc["r"] = spec.r;
  doc["q"] = q_list;
  doc["distance_quantiles"] = quantiles;
  ctx.write_json("distance_quantiles.json", doc);

  const auto center = get_size(ctx.cfg, "center_index", 0);
  if (center >= sample.size()) {
    throw ConfigError("center_index out of range");
  }
  auto profile = small_ball_profile(sample.curves()[center], sample, spec,
                                    basis, quantiles);
  std::ostringstream csv;
  csv << ctx.stamp();
  write_ball_profile_csv(profile, csv);
  ctx.write_text("ball_profile.csv", csv.str());
  return ctx.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional kernel regression toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*run)(const CommonArgs&) = nullptr;
  for (auto [name, desc, fn] :
       {std::tuple{"simulate", "Monte Carlo study over AR(1) settings",
                   &cmd_simulate},
        std::tuple{"forecast", "Rolling one-step-ahead load forecasts",
                   &cmd_forecast},
        std::tuple{"cv", "Leave-one-out CV table for one dataset", &cmd_cv},
        std::tuple{"ratecheck", "Median MSPE versus sample size",
                   &cmd_ratecheck},
        std::tuple{"diagnose", "Small-ball profile and distance quantiles",
                   &cmd_diagnose}}) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", args.config_path, "JSON config file")
        ->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed_override, "override config seed");
    sub->add_option("--threads", args.threads_override,
                    "override worker thread count");
    sub->callback([&run, fn = fn] { run = fn; });
  }

  CLI11_PARSE(app, argc, argv);
  try {
    return run(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
