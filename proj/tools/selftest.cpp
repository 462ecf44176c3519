#include "selftest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <vector>

#include "cevi/estimators.hpp"
#include "cevi/ppd.hpp"
#include "cevi/rng.hpp"
#include "cevi/sampling.hpp"

namespace cevi::tools {

namespace {

LocalSample random_sample(std::mt19937_64& rng, std::size_t m, double censored_share) {
  LocalSample s;
  s.w.resize(m);
  s.flags.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.w[i] = std::pow(uniform01(rng), -0.4);  // heavy-tailed positives
    s.flags[i] = uniform01(rng) < censored_share ? 0 : 1;
  }
  std::sort(s.w.begin(), s.w.end());
  s.phi = 1.0;
  return s;
}

}  // namespace

int run_selftest(std::ostream& out) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    out << (ok ? "[pass] " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  };
  std::mt19937_64 rng(987654321u);

  // quantile/cdf round trip for the three families
  {
    bool ok = true;
    for (Family f : {Family::burr, Family::pareto, Family::frechet})
      for (double gamma : {0.10, 0.31, 0.63, 1.0})
        for (double u = 0.001; u < 0.9995; u += 0.037) {
          const double y = quantile(f, gamma, u);
          if (std::abs(cdf(f, gamma, y) - u) > 1e-12) ok = false;
        }
    check("quantile/cdf round trip", ok);
  }

  // Pareto as the tail limit of Burr(eta=1, lambda=1, tau=1/gamma)
  {
    bool ok = true;
    for (double gamma : {0.1, 0.31, 0.63, 1.0}) {
      const double u = 1.0 - 0x1p-40;
      const BurrShape limit_shape{1.0, 1.0 / gamma};
      const double burr_q = quantile(Family::burr, gamma, u, limit_shape);
      const double pareto_q = quantile(Family::pareto, gamma, u);
      if (std::abs(burr_q / pareto_q - 1.0) > 1e-12) ok = false;
    }
    check("Pareto is the tail limit of Burr", ok);
  }

  // Hill: i-weighted spacing form equals the mean-excess-log form
  {
    bool ok = true;
    for (int rep = 0; rep < 50 && ok; ++rep) {
      const LocalSample s = random_sample(rng, 40, 0.0);
      const std::size_t k = 5 + rep % 30;
      const std::size_t m = s.size();
      double spacing_sum = 0.0;
      for (std::size_t i = 1; i <= k; ++i)
        spacing_sum += double(i) * (std::log(s.w[m - i]) - std::log(s.w[m - i - 1]));
      if (std::abs(spacing_sum / double(k) - hill(s, k)) > 1e-12) ok = false;
    }
    check("Hill two-form identity", ok);
  }

  // scale invariance of the closed-form estimators
  {
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
      LocalSample s = random_sample(rng, 60, 0.3);
      const std::size_t k = 20;
      const double c = std::exp(4.0 * (uniform01(rng) - 0.5));
      LocalSample scaled = s;
      for (double& w : scaled.w) w *= c;
      auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
      ok = ok && close(hill(s, k), hill(scaled, k));
      ok = ok && close(*moment(s, k), *moment(scaled, k));
      ok = ok && close(gh(s, k), gh(scaled, k));
      ok = ok && close(*zipf(s, k), *zipf(scaled, k));
      ok = ok && close(*momr(s, k), *momr(scaled, k));
      ok = ok && close(*pmom(s, k), *pmom(scaled, k));
      ok = ok && close(*ww_km(s, k).value, *ww_km(scaled, k).value);
      ok = ok && close(*ww_kl(s, k).value, *ww_kl(scaled, k).value);
    }
    check("scale invariance", ok);
  }

  // no-censoring reductions
  {
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
      const LocalSample s = random_sample(rng, 50, 0.0);
      const std::size_t m = s.size();
      const std::size_t k = 10 + rep;
      ok = ok && std::abs(*ww_km(s, k).value - hill(s, k)) <= 1e-10;
      ok = ok && phat(s, k) == 1.0 && *adapt(hill(s, k), phat(s, k)) == hill(s, k);
      for (std::size_t j = 1; j + 1 < m; ++j) {
        if (km_survival(s, s.w[j - 1], SurvivalTarget::censoring) != 1.0) ok = false;
        const double expected = double(m - j) / double(m);
        if (std::abs(km_survival(s, s.w[j - 1], SurvivalTarget::lifetime) - expected) > 1e-12)
          ok = false;
      }
    }
    check("no-censoring reductions", ok);
  }

  // Kaplan-Meier hand example and monotonicity
  {
    LocalSample s;
    s.w = {1.0, 2.0, 3.0};
    s.flags = {1, 0, 1};
    bool ok = std::abs(km_survival(s, 2.0, SurvivalTarget::lifetime) - 2.0 / 3.0) < 1e-15 &&
              std::abs(km_survival(s, 2.0, SurvivalTarget::censoring) - 0.5) < 1e-15;
    const LocalSample r = random_sample(rng, 40, 0.4);
    double prev_f = 1.0, prev_g = 1.0;
    for (std::size_t j = 1; j + 1 < r.size(); ++j) {
      const double f = km_survival(r, r.w[j - 1], SurvivalTarget::lifetime);
      const double g = km_survival(r, r.w[j - 1], SurvivalTarget::censoring);
      if (f > prev_f || g > prev_g || f < 0.0 || g < 0.0 || f > 1.0 || g > 1.0) ok = false;
      prev_f = f;
      prev_g = g;
    }
    check("Kaplan-Meier values and monotonicity", ok);
  }

  // pmom/momr/moment share the log moments: pmom = momr + moment - M1
  {
    bool ok = true;
    for (int rep = 0; rep < 20 && ok; ++rep) {
      const LocalSample s = random_sample(rng, 50, 0.2);
      const std::size_t k = 15;
      const double lhs = *pmom(s, k);
      const double rhs = *momr(s, k) + *moment(s, k) - log_moment(s, k, 1);
      if (std::abs(lhs - rhs) > 1e-12) ok = false;
    }
    check("pmom = momr + moment - M1", ok);
  }

  // perturbed Pareto density and survival on the constraint set
  {
    bool ok = true;
    for (int rep = 0; rep < 200 && ok; ++rep) {
      PpdParams p;
      p.gamma = 0.05 + 0.95 * uniform01(rng);
      p.tau = 0.2 + 2.8 * uniform01(rng);
      p.c = -1.0 / p.tau + (1.0 + 1.0 / p.tau) * uniform01(rng) * 0.999;
      if (!p.valid()) { ok = false; break; }
      if (std::abs(ppd_survival(p, 1.0) - 1.0) > 1e-12) ok = false;
      for (double w = 1.0; w < 50.0; w *= 1.5)
        if (ppd_density(p, w) < 0.0) ok = false;
      if (!(ppd_survival(p, 1e8) < 1e-6 * ppd_survival(p, 10.0))) ok = false;
    }
    check("perturbed Pareto density/survival", ok);
  }

  // with c frozen at 0 the fitted gamma is the Hill estimate
  {
    std::vector<double> v;
    for (int i = 0; i < 80; ++i) v.push_back(std::pow(uniform01(rng), -0.4));
    for (double& x : v) x = std::max(x, 1.0 + 1e-9);
    PpdFitOptions opts;
    opts.fix_c_zero = true;
    const FitResult fit = fit_ppd(v, std::nullopt, opts);
    double hill_gamma = 0.0;
    for (double x : v) hill_gamma += std::log(x);
    hill_gamma /= double(v.size());
    check("PPD reduces to the Pareto MLE at c = 0",
          fit.converged && std::abs(fit.params.gamma - hill_gamma) < 1e-3);
  }

  // dataset generation is deterministic in the seed
  {
    const CovariateModel model;
    const CensoringScheme scheme;
    const Dataset a = sample_dataset(model, scheme, 500, 42);
    const Dataset b = sample_dataset(model, scheme, 500, 42);
    check("seeded sampling determinism", a.z == b.z && a.delta == b.delta && a.x == b.x);
  }

  out << (failures == 0 ? "selftest: all checks passed\n"
                        : "selftest: " + std::to_string(failures) + " check(s) FAILED\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace cevi::tools
