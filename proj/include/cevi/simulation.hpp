#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cevi/estimators.hpp"
#include "cevi/sampling.hpp"

namespace cevi {

// Full description of one Monte-Carlo study: which families/covariate
// points/censoring levels to cross, the sampling design, and the estimation
// grid. Defaults follow the desk-scale profile (n=2000, R=100, h=0.05,
// gamma1(x) = exp(-0.11 - 2.90x), x* in {0.12, 0.37, 0.75}, noncensored tail
// fractions {0.90, 0.65, 0.45}).
struct StudyConfig {
  std::vector<Family> families{Family::burr};
  double beta0 = -0.11;
  double beta1 = -2.90;
  BurrShape burr{};
  std::vector<double> x_stars{0.12, 0.37, 0.75};
  std::vector<double> p_levels{0.90, 0.65, 0.45};
  std::size_t n = 2000;
  std::size_t replications = 100;
  double h = 0.05;
  std::vector<std::size_t> k_grid;  // empty: filled by finalize()
  std::vector<EstimatorKind> kinds{all_estimator_kinds,
                                   all_estimator_kinds + std::size(all_estimator_kinds)};
  std::uint64_t master_seed = 20210614;
  std::optional<Family> censor_family;  // default: same family as the lifetime
  bool no_censoring = false;
  // Studies default to the consecutive-spacing WW.KL variant: the cumulative
  // form grows linearly in k and cannot track gamma1 at all, which breaks
  // every censoring-level comparison it appears in. ww_kl() itself keeps the
  // cumulative form as its default; set this to false to push that form
  // through a study as a sensitivity check.
  bool ww_kl_spacing_form = true;
  std::optional<double> ppd_fix_tau;

  friend bool operator==(const StudyConfig&, const StudyConfig&) = default;

  // Default k grid: every 5th k from 5 up to 90% of the expected window size.
  void finalize();
  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  CovariateModel covariate_model(Family f) const;
  CensoringScheme censoring_scheme(Family f, double p) const;
  EstimateOptions estimate_options() const;
};

struct ReplicationResult {
  std::uint64_t seed = 0;
  std::size_t m = 0;
  bool sparse_window = false;  // m < 6: every series entry is missing
  std::vector<EstimateSeries> series;
};

struct PerformanceRow {
  Family family{};
  double x_star = 0.0;
  double gamma_true = 0.0;
  double p_level = 0.0;
  EstimatorKind kind{};
  std::size_t k = 0;
  std::optional<double> median_bias;
  std::optional<double> mse;
  std::size_t n_valid = 0;
  std::size_t n_missing = 0;
  bool unreliable = false;  // n_valid < R/2
};

struct PerformanceTable {
  std::vector<PerformanceRow> rows;
};

// Stable per-replication seed; distinct cells and indices decorrelate through
// 64-bit mixing, so a study subset can be rerun in isolation.
std::uint64_t replication_seed(std::uint64_t master_seed, Family family, double x_star,
                               double p, std::size_t replication_index);

// One pass of the generate/window/estimate pipeline at a covariate point and
// censoring level. Estimates cover config.k_grid with explicit missing
// entries where k exceeds m-1 or a formula degenerates.
ReplicationResult run_replication(const StudyConfig& config, Family family, double x_star,
                                  double p, std::uint64_t seed);

// Raw per-replication series of one study cell, retained for audits.
struct CellResults {
  Family family{};
  double x_star = 0.0;
  double p_level = 0.0;
  std::vector<ReplicationResult> replications;
};

// Median bias and MSE per (family, x*, p, estimator, k). Replications run in
// parallel (OpenMP when enabled); aggregation consumes them in replication
// order, so the table does not depend on the schedule. `details`, when
// non-null, receives every replication's series.
PerformanceTable run_study(const StudyConfig& config, std::vector<CellResults>* details = nullptr);

// Single-threaded reference implementation of the same study; kept for
// testing and benchmarking against the parallel path.
PerformanceTable run_study_serial(const StudyConfig& config,
                                  std::vector<CellResults>* details = nullptr);

// Aggregation kernel shared by both drivers: median over the valid estimates
// minus gamma_true, and the mean squared deviation from gamma_true.
struct Aggregate {
  std::optional<double> median_bias;
  std::optional<double> mse;
  std::size_t n_valid = 0;
  std::size_t n_missing = 0;
};
Aggregate aggregate_estimates(std::span<const std::optional<double>> estimates,
                              double gamma_true);

}  // namespace cevi
