// Wall-clock comparison of the serial reference driver against the
// OpenMP-parallel one on the same study, verifying that both produce the
// identical table while they race.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cevi/simulation.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

bool tables_equal(const cevi::PerformanceTable& a, const cevi::PerformanceTable& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.kind != y.kind || x.k != y.k || x.median_bias != y.median_bias || x.mse != y.mse ||
        x.n_valid != y.n_valid)
      return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  cevi::StudyConfig config;
  config.families = {cevi::Family::burr};
  config.x_stars = {0.12, 0.37};
  config.p_levels = {0.9, 0.65};
  config.n = 2000;
  config.replications = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 24;
  config.h = 0.05;
  config.master_seed = 555;
  config.finalize();

  std::printf("study: burr, %zu x* x %zu p cells, R=%zu, n=%zu, |k|=%zu\n",
              config.x_stars.size(), config.p_levels.size(), config.replications, config.n,
              config.k_grid.size());

  auto t0 = clock_type::now();
  const cevi::PerformanceTable serial = cevi::run_study_serial(config);
  const double serial_s = seconds_since(t0);
  std::printf("serial reference: %8.2f s\n", serial_s);

#ifdef _OPENMP
  std::printf("openmp threads:   %8d\n", omp_get_max_threads());
#endif
  t0 = clock_type::now();
  const cevi::PerformanceTable parallel = cevi::run_study(config);
  const double parallel_s = seconds_since(t0);
  std::printf("openmp driver:    %8.2f s   speedup x%.2f\n", parallel_s, serial_s / parallel_s);

  if (!tables_equal(serial, parallel)) {
    std::printf("MISMATCH: serial and parallel drivers disagree\n");
    return 1;
  }
  std::printf("tables identical\n");
  return 0;
}
