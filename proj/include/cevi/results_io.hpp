#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cevi/config.hpp"
#include "cevi/simulation.hpp"

namespace cevi::io {

// results.csv with the fixed header
//   family,x_star,gamma_true,p_censor,estimator,k,median_bias,mse,n_valid,n_missing
// rows sorted by (family, x_star, p_censor, estimator, k), numbers written as
// shortest round-trip decimals, missing aggregates as empty fields. A
// manifest.json sidecar carries the full config and seed. Returns the paths
// written.
std::vector<std::filesystem::path> write_results(const PerformanceTable& table,
                                                 const RunManifest& manifest,
                                                 const std::filesystem::path& dir);

// Parses a results.csv produced by write_results; used for round-trip checks.
PerformanceTable read_results(const std::filesystem::path& path);

// Per (family, censoring level): one bias file and one mse file, each in long
// format with one row per (estimator, k) and one value column per covariate
// point. Estimators with no valid value anywhere in a file are left out and
// listed in a plots.json sidecar next to the data files.
std::vector<std::filesystem::path> emit_plot_data(const PerformanceTable& table,
                                                  const std::filesystem::path& dir);

// User data CSV with header z,delta,x (d = 1).
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(const Dataset& data, const std::filesystem::path& path);

// estimator,k,estimate,phat rows for the `estimate` subcommand; missing
// estimates serialize as empty fields.
void write_estimate_series_csv(const std::vector<EstimateSeries>& series, std::ostream& out);

}  // namespace cevi::io
