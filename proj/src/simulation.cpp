#include "cevi/simulation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "cevi/rng.hpp"
#include "cevi/window.hpp"

namespace cevi {

void StudyConfig::finalize() {
  if (kinds.empty())
    kinds.assign(all_estimator_kinds, all_estimator_kinds + std::size(all_estimator_kinds));
  if (k_grid.empty()) {
    const double expected_window = 2.0 * h * static_cast<double>(n);
    const auto top = static_cast<std::size_t>(std::floor(0.9 * expected_window));
    for (std::size_t k = 5; k <= std::max<std::size_t>(top, 5); k += 5) k_grid.push_back(k);
  }
}

void StudyConfig::validate() const {
  if (families.empty()) throw std::invalid_argument("family: at least one family required");
  if (n < 1) throw std::invalid_argument("n: sample size must be >= 1");
  if (replications < 1) throw std::invalid_argument("R: replication count must be >= 1");
  if (!(h > 0.0)) throw std::invalid_argument("h: window radius must be > 0");
  if (!(burr.eta > 0.0)) throw std::invalid_argument("burr_eta: must be > 0");
  if (!(burr.tau > 0.0)) throw std::invalid_argument("burr_tau: must be > 0");
  if (x_stars.empty()) throw std::invalid_argument("x_stars: at least one covariate point");
  for (double x : x_stars)
    if (!(x >= 0.0) || !(x <= 1.0))
      throw std::invalid_argument("x_stars: covariate points must lie in [0,1]");
  if (p_levels.empty()) throw std::invalid_argument("p_levels: at least one censoring level");
  for (double p : p_levels)
    if (!(p > 0.0) || !(p < 1.0))
      throw std::invalid_argument("p_levels: noncensored fractions must lie in (0,1)");
  if (k_grid.empty()) throw std::invalid_argument("k_grid: must not be empty");
  for (std::size_t k : k_grid)
    if (k < 1) throw std::invalid_argument("k_grid: entries must be >= 1");
  if (!std::is_sorted(k_grid.begin(), k_grid.end()))
    throw std::invalid_argument("k_grid: entries must be ascending");
  if (kinds.empty()) throw std::invalid_argument("kinds: at least one estimator");
  if (ppd_fix_tau && !(*ppd_fix_tau > 0.0))
    throw std::invalid_argument("ppd_fix_tau: must be > 0");
}

CovariateModel StudyConfig::covariate_model(Family f) const {
  return CovariateModel{beta0, beta1, f, burr};
}

CensoringScheme StudyConfig::censoring_scheme(Family f, double p) const {
  return CensoringScheme{p, censor_family.value_or(f), burr, !no_censoring};
}

EstimateOptions StudyConfig::estimate_options() const {
  EstimateOptions opt;
  opt.ww_kl_spacing_form = ww_kl_spacing_form;
  opt.ppd.fix_tau = ppd_fix_tau;
  return opt;
}

std::uint64_t replication_seed(std::uint64_t master_seed, Family family, double x_star,
                               double p, std::size_t replication_index) {
  std::uint64_t h = master_seed;
  h = hash_combine(h, static_cast<std::uint64_t>(family) + 1);
  h = hash_combine(h, std::bit_cast<std::uint64_t>(x_star));
  h = hash_combine(h, std::bit_cast<std::uint64_t>(p));
  h = hash_combine(h, replication_index);
  return h;
}

namespace {

constexpr std::size_t kMinWindow = 6;  // below this the window cannot support k >= 5

std::vector<EstimateSeries> all_missing_series(const StudyConfig& config) {
  std::vector<EstimateSeries> series;
  series.reserve(config.kinds.size());
  for (EstimatorKind kind : config.kinds) {
    EstimateSeries s;
    s.kind = kind;
    s.k_values = config.k_grid;
    s.estimates.resize(config.k_grid.size());
    s.phat.assign(config.k_grid.size(), 0.0);
    s.degenerate.assign(config.k_grid.size(), 0);
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace

ReplicationResult run_replication(const StudyConfig& config, Family family, double x_star,
                                  double p, std::uint64_t seed) {
  ReplicationResult result;
  result.seed = seed;

  const Dataset data = sample_dataset(config.covariate_model(family),
                                      config.censoring_scheme(family, p), config.n, seed);
  const LocalSample sample = select_window(data, Window{{x_star}, config.h});
  result.m = sample.size();

  if (result.m < kMinWindow) {
    result.sparse_window = true;
    result.series = all_missing_series(config);
    return result;
  }

  // usable top sizes: k in the grid with 5 <= k <= m-1
  std::vector<std::size_t> usable;
  std::vector<std::size_t> usable_pos;
  for (std::size_t i = 0; i < config.k_grid.size(); ++i) {
    const std::size_t k = config.k_grid[i];
    if (k >= 5 && k + 1 <= result.m) {
      usable.push_back(k);
      usable_pos.push_back(i);
    }
  }

  result.series = all_missing_series(config);
  if (usable.empty()) return result;  // grid entirely above m-1

  const auto computed = estimate_all(sample, config.kinds, usable, config.estimate_options());
  for (std::size_t s = 0; s < computed.size(); ++s) {
    for (std::size_t i = 0; i < usable.size(); ++i) {
      const std::size_t pos = usable_pos[i];
      result.series[s].estimates[pos] = computed[s].estimates[i];
      result.series[s].phat[pos] = computed[s].phat[i];
      result.series[s].degenerate[pos] = computed[s].degenerate[i];
    }
  }
  return result;
}

Aggregate aggregate_estimates(std::span<const std::optional<double>> estimates,
                              double gamma_true) {
  Aggregate agg;
  std::vector<double> valid;
  valid.reserve(estimates.size());
  for (const auto& e : estimates)
    if (e) valid.push_back(*e);
  agg.n_valid = valid.size();
  agg.n_missing = estimates.size() - valid.size();
  if (valid.empty()) return agg;

  std::sort(valid.begin(), valid.end());
  const std::size_t h = valid.size() / 2;
  const double median =
      valid.size() % 2 == 1 ? valid[h] : 0.5 * (valid[h - 1] + valid[h]);
  agg.median_bias = median - gamma_true;

  double sq = 0.0;
  for (double v : valid) sq += (v - gamma_true) * (v - gamma_true);
  agg.mse = sq / static_cast<double>(valid.size());
  return agg;
}

namespace {

void aggregate_cell(const StudyConfig& config, Family family, double x_star, double p,
                    const std::vector<ReplicationResult>& reps, PerformanceTable& table) {
  const double gamma_true = gamma1_of(config.covariate_model(family), x_star);
  const std::size_t R = reps.size();

  std::vector<std::optional<double>> column(R);
  for (std::size_t s = 0; s < config.kinds.size(); ++s) {
    for (std::size_t i = 0; i < config.k_grid.size(); ++i) {
      for (std::size_t r = 0; r < R; ++r) column[r] = reps[r].series[s].estimates[i];
      const Aggregate agg = aggregate_estimates(column, gamma_true);

      PerformanceRow row;
      row.family = family;
      row.x_star = x_star;
      row.gamma_true = gamma_true;
      row.p_level = p;
      row.kind = config.kinds[s];
      row.k = config.k_grid[i];
      row.median_bias = agg.median_bias;
      row.mse = agg.mse;
      row.n_valid = agg.n_valid;
      row.n_missing = agg.n_missing;
      row.unreliable = agg.n_valid * 2 < R;
      table.rows.push_back(row);
    }
  }
}

struct Cell {
  Family family;
  double x_star;
  double p;
};

std::vector<Cell> study_cells(const StudyConfig& config) {
  std::vector<Cell> cells;
  for (Family f : config.families)
    for (double x : config.x_stars)
      for (double p : config.p_levels) cells.push_back({f, x, p});
  return cells;
}

PerformanceTable run_study_impl(const StudyConfig& config, std::vector<CellResults>* details,
                                bool parallel) {
  config.validate();
  PerformanceTable table;
  const std::size_t R = config.replications;

  for (const Cell& cell : study_cells(config)) {
    std::vector<ReplicationResult> reps(R);
    std::exception_ptr error;

    if (parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
      for (std::int64_t r = 0; r < static_cast<std::int64_t>(R); ++r) {
        try {
          const std::uint64_t seed = replication_seed(config.master_seed, cell.family,
                                                      cell.x_star, cell.p,
                                                      static_cast<std::size_t>(r));
          reps[static_cast<std::size_t>(r)] =
              run_replication(config, cell.family, cell.x_star, cell.p, seed);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
          if (!error) error = std::current_exception();
        }
      }
    } else {
      for (std::size_t r = 0; r < R; ++r) {
        const std::uint64_t seed =
            replication_seed(config.master_seed, cell.family, cell.x_star, cell.p, r);
        reps[r] = run_replication(config, cell.family, cell.x_star, cell.p, seed);
      }
    }
    if (error) std::rethrow_exception(error);

    aggregate_cell(config, cell.family, cell.x_star, cell.p, reps, table);
    if (details)
      details->push_back(CellResults{cell.family, cell.x_star, cell.p, std::move(reps)});
  }
  return table;
}

}  // namespace

PerformanceTable run_study(const StudyConfig& config, std::vector<CellResults>* details) {
  return run_study_impl(config, details, /*parallel=*/true);
}

PerformanceTable run_study_serial(const StudyConfig& config, std::vector<CellResults>* details) {
  return run_study_impl(config, details, /*parallel=*/false);
}

}  // namespace cevi
