// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Statistical checks use fixed seeds; the expected values and
// tolerances are pinned in code.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cevi/config.hpp"
#include "cevi/estimators.hpp"
#include "cevi/ppd.hpp"
#include "cevi/results_io.hpp"
#include "cevi/rng.hpp"
#include "cevi/simulation.hpp"

namespace fs = std::filesystem;
using namespace cevi;

namespace {

struct Harness {
  int failed = 0;
  std::vector<std::string> notes;

  void criterion(int number, const std::string& name, double budget_seconds,
                 const std::function<bool(std::string&)>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    if (elapsed > budget_seconds) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number,
                name.c_str(), elapsed, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
  }
};

LocalSample geometric_sample(std::size_t m) {
  LocalSample s;
  for (std::size_t j = 1; j <= m; ++j) s.w.push_back(std::exp(double(j)));
  s.flags.assign(m, 1);
  s.phi = 1.0;
  return s;
}

LocalSample random_sample(std::mt19937_64& rng, std::size_t m, double censored_share) {
  LocalSample s;
  for (std::size_t i = 0; i < m; ++i) {
    s.w.push_back(std::pow(uniform01(rng), -0.45));
    s.flags.push_back(uniform01(rng) < censored_share ? 0 : 1);
  }
  std::sort(s.w.begin(), s.w.end());
  s.phi = 1.0;
  return s;
}

LocalSample pareto_sample(std::uint64_t seed, std::size_t m, double gamma) {
  auto rng = make_engine(seed);
  LocalSample s;
  for (std::size_t i = 0; i < m; ++i) s.w.push_back(std::pow(1.0 - uniform01(rng), -gamma));
  std::sort(s.w.begin(), s.w.end());
  s.flags.assign(m, 1);
  s.phi = 1.0;
  return s;
}

LocalSample censored_pareto_sample(std::uint64_t seed, std::size_t m, double gamma, double p) {
  auto rng_y = make_engine(hash_combine(seed, 1));
  auto rng_c = make_engine(hash_combine(seed, 2));
  const double gamma2 = gamma * p / (1.0 - p);
  std::vector<std::pair<double, std::uint8_t>> obs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = std::pow(1.0 - uniform01(rng_y), -gamma);
    const double c = std::pow(1.0 - uniform01(rng_c), -gamma2);
    obs[i] = {std::min(y, c), y <= c ? std::uint8_t{1} : std::uint8_t{0}};
  }
  std::sort(obs.begin(), obs.end());
  LocalSample s;
  for (auto& [z, d] : obs) {
    s.w.push_back(z);
    s.flags.push_back(d);
  }
  s.phi = 1.0;
  return s;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return v[x] < v[y];
    });
    std::vector<double> r(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double mid = 0.5 * (double(i) + double(j)) + 1.0;
      for (std::size_t t = i; t <= j; ++t) r[order[t]] = mid;
      i = j + 1;
    }
    return r;
  };
  const std::vector<double> ra = ranks(a), rb = ranks(b);
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += ra[i];
    mb += rb[i];
  }
  ma /= double(n);
  mb /= double(n);
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    va += (ra[i] - ma) * (ra[i] - ma);
    vb += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

// brute-force maximum of the mixture log likelihood over the 200^3 grid on
// [0.1,2] x (-0.5,0.9) x [0.2,3]; independent of the fit path (straight
// formula evaluation with its own inner loops)
double grid_oracle_max(const std::vector<double>& v) {
  const int n_points = 200;
  std::vector<double> log_v(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) log_v[i] = std::log(v[i]);

  double best = -1e300;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(max : best)
#endif
  for (int gi = 0; gi < n_points; ++gi) {
    const double gamma = 0.1 + 1.9 * gi / double(n_points - 1);
    std::vector<double> pareto_part(log_v.size());
    for (std::size_t j = 0; j < log_v.size(); ++j)
      pareto_part[j] = std::exp((-1.0 / gamma - 1.0) * log_v[j]) / gamma;
    for (int ti = 0; ti < n_points; ++ti) {
      const double tau = 0.2 + 2.8 * ti / double(n_points - 1);
      std::vector<double> perturbed_part(log_v.size());
      for (std::size_t j = 0; j < log_v.size(); ++j)
        perturbed_part[j] =
            (1.0 / gamma + tau) * std::exp((-1.0 / gamma - tau - 1.0) * log_v[j]);
      for (int ci = 0; ci < n_points; ++ci) {
        const double c = -0.5 + 1.4 * (ci + 0.5) / double(n_points);
        if (!(c > -1.0 / tau)) continue;
        double ll = 0.0;
        for (std::size_t j = 0; j < log_v.size(); ++j) {
          const double density = (1.0 - c) * pareto_part[j] + c * perturbed_part[j];
          if (!(density > 0.0)) {
            ll = -1e300;
            break;
          }
          ll += std::log(density);
        }
        if (ll > best) best = ll;
      }
    }
  }
  return best;
}

int run_cli(const std::string& command) {
  const int status = std::system(command.c_str());
  return status;
}

}  // namespace

int main() {
  Harness h;

  // 1 ------------------------------------------------------------------
  h.criterion(1, "closed-form estimator suite on the geometric sample", 1.0,
              [](std::string& detail) {
                const LocalSample s = geometric_sample(10);
                bool ok = true;
                ok &= near(hill(s, 4), 2.5, 1e-12);
                ok &= near(*momr(s, 4), 1.5, 1e-12);
                ok &= near(*moment(s, 4), 0.5, 1e-12);
                ok &= near(*pmom(s, 4), -0.5, 1e-12);
                ok &= near(*ww_kl(s, 4).value, 5.0, 1e-12);
                ok &= near(*zipf(s, 2), 1.0, 1e-12);
                if (!ok) detail = "a closed-form value moved off its pinned constant";
                return ok;
              });

  // 2 ------------------------------------------------------------------
  h.criterion(2, "no-censoring reductions over 200 random samples", 5.0,
              [](std::string& detail) {
                std::mt19937_64 rng(20210614);
                for (int rep = 0; rep < 200; ++rep) {
                  const std::size_t m = 20 + rep % 60;
                  const LocalSample s = random_sample(rng, m, 0.0);
                  const std::size_t k = 2 + rep % (m - 2);
                  if (!near(*ww_km(s, k).value, hill(s, k), 1e-10)) {
                    detail = "ww_km != hill";
                    return false;
                  }
                  if (phat(s, k) != 1.0 || *adapt(hill(s, k), 1.0) != hill(s, k)) {
                    detail = "adaptation is not the identity";
                    return false;
                  }
                  for (std::size_t j = 1; j + 1 < m; j += 3) {
                    if (km_survival(s, s.w[j - 1], SurvivalTarget::censoring) != 1.0) {
                      detail = "1-Ghat deviates from 1";
                      return false;
                    }
                    const double empirical = double(m - j) / double(m);
                    if (!near(km_survival(s, s.w[j - 1], SurvivalTarget::lifetime),
                              empirical, 1e-12)) {
                      detail = "1-Fhat deviates from the empirical survival";
                      return false;
                    }
                  }
                }
                return true;
              });

  // 3 ------------------------------------------------------------------
  h.criterion(3, "scale invariance of the eight closed-form estimators", 5.0,
              [](std::string& detail) {
                std::mt19937_64 rng(5150);
                for (int rep = 0; rep < 100; ++rep) {
                  const std::size_t m = 25 + rep % 40;
                  const LocalSample s = random_sample(rng, m, 0.3);
                  const double c = std::exp(6.0 * (uniform01(rng) - 0.5));
                  LocalSample scaled = s;
                  for (double& w : scaled.w) w *= c;
                  const std::size_t k = 4 + rep % (m - 6);
                  auto same = [&](double a, double b) {
                    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
                  };
                  bool ok = same(hill(s, k), hill(scaled, k));
                  ok = ok && same(*moment(s, k), *moment(scaled, k));
                  ok = ok && same(gh(s, k), gh(scaled, k));
                  ok = ok && same(*zipf(s, k), *zipf(scaled, k));
                  ok = ok && same(*momr(s, k), *momr(scaled, k));
                  ok = ok && same(*pmom(s, k), *pmom(scaled, k));
                  ok = ok && same(*ww_km(s, k).value, *ww_km(scaled, k).value);
                  ok = ok && same(*ww_kl(s, k).value, *ww_kl(scaled, k).value);
                  if (!ok) {
                    detail = "an estimator moved under rescaling at rep " + std::to_string(rep);
                    return false;
                  }
                }
                return true;
              });

  // 4 ------------------------------------------------------------------
  h.criterion(4, "PPD fit dominates the brute-force grid", 120.0,
              [](std::string& detail) {
                const LocalSample s = pareto_sample(987001, 400, 0.5);
                const std::vector<double> v = relative_excesses(s, 50);
                const double grid_max = grid_oracle_max(v);
                const FitResult fit = fit_ppd(v);
                detail = "grid max " + std::to_string(grid_max) + ", fit " +
                         std::to_string(fit.loglik);
                // frozen from the first oracle run; guards the oracle itself
                const double recorded_grid_max = -27.864708426168615;
                if (std::abs(grid_max - recorded_grid_max) > 1e-6) {
                  detail += "; oracle drifted from its recorded value";
                  return false;
                }
                return fit.converged && fit.loglik >= grid_max - 1e-6;
              });

  // 5 ------------------------------------------------------------------
  h.criterion(5, "statistical consistency at desk scale", 180.0,
              [](std::string& detail) {
                const std::size_t m = 2000, k = 200;
                const int seeds = 200;
                const double gamma = 0.5, p = 0.65;

                double hill_mean = 0, zipf_mean = 0, momr_mean = 0;
                for (int seed = 0; seed < seeds; ++seed) {
                  const LocalSample s = pareto_sample(hash_combine(81000, seed), m, gamma);
                  hill_mean += hill(s, k);
                  zipf_mean += *zipf(s, k);
                  momr_mean += *momr(s, k);
                }
                hill_mean /= seeds;
                zipf_mean /= seeds;
                momr_mean /= seeds;

                double ahill = 0, amom = 0, appd = 0, wwkm = 0;
                int ppd_count = 0;
                for (int seed = 0; seed < seeds; ++seed) {
                  const LocalSample s =
                      censored_pareto_sample(hash_combine(82000, seed), m, gamma, p);
                  const double ph = phat(s, k);
                  ahill += *adapt(hill(s, k), ph);
                  amom += *adapt(*moment(s, k), ph);
                  wwkm += *ww_km(s, k).value;
                  const FitResult fit = fit_ppd(relative_excesses(s, k));
                  if (fit.converged) {
                    appd += *adapt(fit.params.gamma, ph);
                    ++ppd_count;
                  }
                }
                ahill /= seeds;
                amom /= seeds;
                wwkm /= seeds;
                appd /= std::max(ppd_count, 1);

                std::ostringstream os;
                os.precision(3);
                os << "uncensored hill/zipf/momr = " << hill_mean << "/" << zipf_mean << "/"
                   << momr_mean << "; censored hill/mom/ppd/wwkm = " << ahill << "/" << amom
                   << "/" << appd << "/" << wwkm << " (ppd converged " << ppd_count << "/"
                   << seeds << ")";
                detail = os.str();

                return near(hill_mean, gamma, 0.05) && near(zipf_mean, gamma, 0.05) &&
                       near(momr_mean, gamma, 0.05) && near(ahill, gamma, 0.08) &&
                       near(amom, gamma, 0.08) && near(appd, gamma, 0.08) &&
                       near(wwkm, gamma, 0.08) && ppd_count >= seeds * 9 / 10;
              });

  // 6 ------------------------------------------------------------------
  h.criterion(6, "trend reproduction on the Burr study", 600.0, [](std::string& detail) {
    StudyConfig config;
    config.families = {Family::burr};
    config.x_stars = {0.12, 0.75};
    config.p_levels = {0.90, 0.45};
    config.n = 2000;
    config.replications = 100;
    config.h = 0.05;
    for (std::size_t k = 5; k <= 150; k += 5) config.k_grid.push_back(k);
    config.master_seed = 1889;
    config.finalize();

    const PerformanceTable table = run_study(config);

    const auto row_of = [&](EstimatorKind kind, std::size_t k, double x,
                            double p) -> const PerformanceRow* {
      for (const auto& r : table.rows)
        if (r.kind == kind && r.k == k && r.x_star == x && r.p_level == p) return &r;
      return nullptr;
    };

    std::ostringstream os;
    bool ok = true;

    // (a) heavier censoring does not improve the MSE: per estimator, a
    // majority of k values must have mse(p=0.45) >= mse(p=0.90) at x*=0.12
    for (EstimatorKind kind : config.kinds) {
      int favourable = 0, total = 0;
      for (std::size_t k : config.k_grid) {
        const auto* heavy = row_of(kind, k, 0.12, 0.45);
        const auto* light = row_of(kind, k, 0.12, 0.90);
        if (!heavy || !light || !heavy->mse || !light->mse) continue;
        ++total;
        if (*heavy->mse >= *light->mse) ++favourable;
      }
      if (total == 0 || 2 * favourable <= total) {
        ok = false;
        os << "(a) fails for " << to_string(kind) << " " << favourable << "/" << total << "; ";
      }
    }

    // (b) Hill's absolute median bias grows with k at x*=0.12, p=0.90
    {
      std::vector<double> ks, abs_bias;
      for (std::size_t k : config.k_grid) {
        const auto* r = row_of(EstimatorKind::hill, k, 0.12, 0.90);
        if (r && r->median_bias) {
          ks.push_back(double(k));
          abs_bias.push_back(std::abs(*r->median_bias));
        }
      }
      const double rho = spearman(abs_bias, ks);
      os << "(b) spearman = " << rho << "; ";
      if (!(rho > 0.5)) {
        ok = false;
        os << "(b) fails; ";
      }
    }

    // (c) adapted Hill MSE at the small index x*=0.75 exceeds its MSE at
    // x*=0.12 for a majority of matched k (p = 0.90)
    {
      int favourable = 0, total = 0;
      for (std::size_t k : config.k_grid) {
        const auto* small_gamma = row_of(EstimatorKind::hill, k, 0.75, 0.90);
        const auto* large_gamma = row_of(EstimatorKind::hill, k, 0.12, 0.90);
        if (!small_gamma || !large_gamma || !small_gamma->mse || !large_gamma->mse) continue;
        ++total;
        if (*small_gamma->mse > *large_gamma->mse) ++favourable;
      }
      os << "(c) " << favourable << "/" << total;
      if (total == 0 || 2 * favourable <= total) {
        ok = false;
        os << " fails";
      }
    }

    detail = os.str();
    return ok;
  });

  // 7 ------------------------------------------------------------------
  h.criterion(7, "byte-identical rerun from the manifest", 300.0, [](std::string& detail) {
    const fs::path base = fs::temp_directory_path() / "cevi_acceptance_run";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path config_path = base / "study.cfg";
    {
      std::ofstream cfg(config_path);
      cfg << "family = burr\nn = 500\nR = 20\nx_stars = 0.12,0.37\n"
             "p_levels = 0.9,0.45\nk_grid = 5:30:5\nmaster_seed = 31415\n";
    }
    const std::string cli = CEVI_CLI_PATH;
    const fs::path out_a = base / "a";
    const fs::path out_b = base / "b";

    // first run saturates the cores, the rerun is single threaded and serial
    const std::string run_a = "OMP_NUM_THREADS=4 '" + cli + "' run '" + config_path.string() +
                              "' --out '" + out_a.string() + "' --no-plots > /dev/null";
    const std::string run_b = "OMP_NUM_THREADS=1 '" + cli + "' run '" +
                              (out_a / "manifest.json").string() + "' --serial --out '" +
                              out_b.string() + "' --no-plots > /dev/null";
    if (run_cli(run_a) != 0 || run_cli(run_b) != 0) {
      detail = "cli invocation failed";
      return false;
    }
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    const std::string a = slurp(out_a / "results.csv");
    const std::string b = slurp(out_b / "results.csv");
    if (a.empty() || a != b) {
      detail = "results.csv differs between runs";
      return false;
    }
    return true;
  });

  std::printf("%d of 7 criteria failed\n", h.failed);
  return h.failed == 0 ? 0 : 1;
}
