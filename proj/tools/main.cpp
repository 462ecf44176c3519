#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "cevi/config.hpp"
#include "cevi/results_io.hpp"
#include "cevi/version.hpp"
#include "selftest.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run_command(const std::string& config_path, const std::string& out_flag,
                const std::vector<std::pair<std::string, std::string>>& overrides,
                int threads, bool serial, bool skip_plots) {
  cevi::StudyConfig config = cevi::io::parse_config(config_path);
  for (const auto& [key, value] : overrides) cevi::io::apply_config_override(config, key, value);
  config.finalize();
  config.validate();

  const std::string warning = cevi::io::runtime_warning(config);
  if (!warning.empty()) std::cerr << "warning: " << warning << "\n";

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif

  std::filesystem::path out_dir = out_flag.empty() ? "cevi_out" : out_flag;
  if (const char* env = std::getenv("CEVI_OUT_DIR"); env && *env && out_flag.empty())
    out_dir = env;

  cevi::io::RunManifest manifest;
  manifest.config = config;
  manifest.tool_version = cevi::version;
  manifest.started_at = utc_timestamp();
  manifest.master_seed = config.master_seed;

  const cevi::PerformanceTable table =
      serial ? cevi::run_study_serial(config) : cevi::run_study(config);

  const auto paths = cevi::io::write_results(table, manifest, out_dir);
  for (const auto& p : paths) std::cout << p.string() << "\n";
  if (!skip_plots) {
    for (const auto& p : cevi::io::emit_plot_data(table, out_dir))
      std::cout << p.string() << "\n";
  }
  return 0;
}

int estimate_command(const std::string& data_path, double x_star, double h,
                     const std::string& kinds_str, std::size_t k_min, std::size_t k_max,
                     std::size_t k_step, const std::string& out_path, bool spacing_form,
                     double fix_tau) {
  const cevi::Dataset data = cevi::io::read_dataset_csv(data_path);
  const cevi::LocalSample sample = cevi::select_window(data, cevi::Window{{x_star}, h});
  if (sample.size() < 2) {
    std::cerr << "error: window around x=" << x_star << " holds " << sample.size()
              << " observation(s); nothing to estimate\n";
    return 1;
  }

  std::vector<cevi::EstimatorKind> kinds;
  if (kinds_str == "all")
    kinds.assign(cevi::all_estimator_kinds,
                 cevi::all_estimator_kinds + std::size(cevi::all_estimator_kinds));
  else {
    std::stringstream ss(kinds_str);
    std::string item;
    while (std::getline(ss, item, ',')) kinds.push_back(cevi::parse_estimator_kind(item));
  }

  const std::size_t top = std::min(k_max == 0 ? sample.size() - 1 : k_max, sample.size() - 1);
  std::vector<std::size_t> k_grid;
  for (std::size_t k = k_min; k <= top; k += k_step) k_grid.push_back(k);
  if (k_grid.empty()) {
    std::cerr << "error: empty k grid (window has m=" << sample.size() << ")\n";
    return 1;
  }

  cevi::EstimateOptions options;
  options.ww_kl_spacing_form = spacing_form;
  if (fix_tau > 0.0) options.ppd.fix_tau = fix_tau;

  const auto series = cevi::estimate_all(sample, kinds, k_grid, options);
  if (out_path.empty()) {
    cevi::io::write_estimate_series_csv(series, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return 1;
    }
    cevi::io::write_estimate_series_csv(series, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional extreme value index estimation under right random censoring"};
  app.set_help_flag("--help", "print help and exit");
  app.set_version_flag("--version", std::string(cevi::version));
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a Monte-Carlo study from a config file");
  std::string config_path, out_dir;
  int threads = 0;
  bool serial = false, skip_plots = false;
  std::vector<std::pair<std::string, std::string>> overrides;
  run->add_option("config", config_path, "flat key=value config or manifest.json")->required();
  run->add_option("--out", out_dir, "output directory (default cevi_out; CEVI_OUT_DIR)");
  run->add_option("--threads", threads, "worker thread count (default: all cores)");
  run->add_flag("--serial", serial, "use the single-threaded reference driver");
  run->add_flag("--no-plots", skip_plots, "skip plot data emission");
  run->add_option_function<std::vector<std::string>>(
         "--set",
         [&overrides](const std::vector<std::string>& pairs) {
           for (const auto& pair : pairs) {
             const auto eq = pair.find('=');
             if (eq == std::string::npos)
               throw CLI::ValidationError("--set expects key=value, got '" + pair + "'");
             overrides.emplace_back(pair.substr(0, eq), pair.substr(eq + 1));
           }
         },
         "override a config key, e.g. --set R=1000 (repeatable)")
      ->take_all();

  // estimate
  auto* est = app.add_subcommand("estimate", "apply the estimators to a z,delta,x CSV");
  est->set_help_flag("--help", "print help and exit");
  std::string data_path, est_out, kinds_str = "all";
  double x_star = 0.5, window_h = 0.05, fix_tau = 0.0;
  std::size_t k_min = 5, k_max = 0, k_step = 1;
  bool spacing_form = false;
  est->add_option("data", data_path, "input CSV with header z,delta,x")->required();
  est->add_option("--x", x_star, "covariate point of interest")->required();
  est->add_option("--h", window_h, "window radius")->required();
  est->add_option("--kinds", kinds_str, "comma list of estimators or 'all'");
  est->add_option("--k-min", k_min, "smallest number of top order statistics (default 5)");
  est->add_option("--k-max", k_max, "largest k (default m-1)");
  est->add_option("--k-step", k_step, "k stride (default 1)");
  est->add_option("--out", est_out, "output CSV (default stdout)");
  est->add_flag("--ww-kl-spacing-form", spacing_form, "consecutive-spacing WW.KL variant");
  est->add_option("--ppd-fix-tau", fix_tau, "freeze the perturbation index at this value");

  // selftest
  auto* self = app.add_subcommand("selftest", "run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(config_path, out_dir, overrides, threads, serial, skip_plots);
    if (est->parsed())
      return estimate_command(data_path, x_star, window_h, kinds_str, k_min, k_max, k_step,
                              est_out, spacing_form, fix_tau);
    if (self->parsed()) return cevi::tools::run_selftest(std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
