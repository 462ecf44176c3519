#include "cevi/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace cevi {

const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::hill: return "Hill";
    case EstimatorKind::mom: return "MOM";
    case EstimatorKind::gh: return "GH";
    case EstimatorKind::zipf: return "Zipf";
    case EstimatorKind::momr: return "MomR";
    case EstimatorKind::pmom: return "PMom";
    case EstimatorKind::ppd: return "PPD";
    case EstimatorKind::ww_km: return "WW.KM";
    case EstimatorKind::ww_kl: return "WW.KL";
  }
  throw std::logic_error("unknown estimator kind");
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  std::string s;
  for (char c : name) {
    if (c == '.' || c == '-') c = '_';
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (s == "hill") return EstimatorKind::hill;
  if (s == "mom" || s == "moment") return EstimatorKind::mom;
  if (s == "gh" || s == "uh") return EstimatorKind::gh;
  if (s == "zipf") return EstimatorKind::zipf;
  if (s == "momr") return EstimatorKind::momr;
  if (s == "pmom") return EstimatorKind::pmom;
  if (s == "ppd") return EstimatorKind::ppd;
  if (s == "ww_km" || s == "wwkm") return EstimatorKind::ww_km;
  if (s == "ww_kl" || s == "wwkl") return EstimatorKind::ww_kl;
  throw std::invalid_argument("unknown estimator '" + name + "'");
}

namespace {

// shared precondition: 1 <= k <= m - gap and strictly positive observations
void check_tail(const LocalSample& s, std::size_t k, std::size_t gap = 1) {
  const std::size_t m = s.size();
  if (m < 2) throw std::domain_error("local sample too small for tail estimation");
  if (!(s.w.front() > 0.0)) throw std::domain_error("observations must be strictly positive");
  if (k < 1 || k + gap > m) throw std::domain_error("k out of range for this sample");
}

}  // namespace

double hill(const LocalSample& s, std::size_t k) {
  check_tail(s, k);
  const std::size_t m = s.size();
  const double log_threshold = std::log(s.w[m - k - 1]);
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) sum += std::log(s.w[m - i]) - log_threshold;
  return sum / static_cast<double>(k);
}

double log_moment(const LocalSample& s, std::size_t k, int order) {
  check_tail(s, k);
  if (order != 1 && order != 2) throw std::domain_error("log_moment order must be 1 or 2");
  const std::size_t m = s.size();
  const double log_threshold = std::log(s.w[m - k - 1]);
  double sum = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double e = std::log(s.w[m - i]) - log_threshold;
    sum += order == 1 ? e : e * e;
  }
  return sum / static_cast<double>(k);
}

std::optional<double> moment(const LocalSample& s, std::size_t k) {
  const double m1 = log_moment(s, k, 1);
  const double m2 = log_moment(s, k, 2);
  if (m2 == 0.0) return std::nullopt;
  const double denom = 1.0 - m1 * m1 / m2;
  if (denom == 0.0) return std::nullopt;
  return m1 + 1.0 - 0.5 / denom;
}

double gh(const LocalSample& s, std::size_t k) {
  check_tail(s, k, 2);  // UH_{k+1} reaches down to W_{m-k-1}
  const std::size_t m = s.size();

  // log UH_{j,m} = log W_{m-j} + log(mean log excess over W_{m-j})
  auto log_uh = [&](std::size_t j) {
    const double log_wj = std::log(s.w[m - j - 1]);
    double acc = 0.0;
    for (std::size_t i = 1; i <= j; ++i) acc += std::log(s.w[m - i]) - log_wj;
    return log_wj + std::log(acc / static_cast<double>(j));
  };

  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) sum += log_uh(j);
  return sum / static_cast<double>(k) - log_uh(k + 1);
}

std::optional<double> zipf(const LocalSample& s, std::size_t k) {
  check_tail(s, k);
  if (k == 1) return std::nullopt;  // weight sum is log(1) = 0
  const std::size_t m = s.size();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double weight = std::log(static_cast<double>(k) / static_cast<double>(i));
    const double spacing = std::log(s.w[m - i]) - std::log(s.w[m - i - 1]);
    num += static_cast<double>(i) * spacing * weight;
    den += weight;
  }
  return num / den;
}

std::optional<double> momr(const LocalSample& s, std::size_t k) {
  const double m1 = log_moment(s, k, 1);
  if (m1 == 0.0) return std::nullopt;
  return 0.5 * log_moment(s, k, 2) / m1;
}

std::optional<double> pmom(const LocalSample& s, std::size_t k) {
  const double m1 = log_moment(s, k, 1);
  const double m2 = log_moment(s, k, 2);
  if (m1 == 0.0 || m2 == 0.0) return std::nullopt;
  const double denom = 1.0 - m1 * m1 / m2;
  if (denom == 0.0) return std::nullopt;
  return 0.5 * m2 / m1 + 1.0 - 0.5 / denom;
}

double phat(const LocalSample& s, std::size_t k) {
  check_tail(s, k);
  const std::size_t m = s.size();
  std::size_t uncensored = 0;
  for (std::size_t i = 1; i <= k; ++i) uncensored += s.flags[m - i];
  return static_cast<double>(uncensored) / static_cast<double>(k);
}

std::optional<double> adapt(double raw, double phat_value) {
  if (phat_value < 0.0 || phat_value > 1.0)
    throw std::domain_error("phat must lie in [0,1]");
  if (phat_value == 0.0) return std::nullopt;
  return raw / phat_value;
}

namespace {

double km_product(const LocalSample& s, double b, SurvivalTarget which, bool strict) {
  const std::size_t m = s.size();
  double surv = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double w = s.w[j - 1];
    if (strict ? !(w < b) : !(w <= b)) break;
    const bool event = which == SurvivalTarget::lifetime ? s.flags[j - 1] != 0
                                                         : s.flags[j - 1] == 0;
    if (event)
      surv *= static_cast<double>(m - j) / static_cast<double>(m - j + 1);
  }
  return surv;
}

}  // namespace

double km_survival(const LocalSample& s, double b, SurvivalTarget which) {
  if (s.size() == 0) throw std::domain_error("empty sample");
  if (!(b < s.w.back()))
    throw std::domain_error("km_survival is defined for b below the sample maximum");
  return km_product(s, b, which, /*strict=*/false);
}

double km_survival_left(const LocalSample& s, double b, SurvivalTarget which) {
  if (s.size() == 0) throw std::domain_error("empty sample");
  if (!(b <= s.w.back()))
    throw std::domain_error("km_survival_left is defined for b up to the sample maximum");
  return km_product(s, b, which, /*strict=*/true);
}

KaplanMeierTables KaplanMeierTables::build(const LocalSample& s) {
  const std::size_t m = s.size();
  KaplanMeierTables t;
  t.lifetime_surv.resize(m);
  t.censoring_surv_left.resize(m);

  // cumulative products over ranks, then align with ties:
  // lifetime_surv[r] multiplies every rank with W_j <= W_r, the left limit
  // every rank with W_j < W_r.
  std::vector<double> cum_f(m), cum_g(m);
  double f = 1.0, g = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    const double factor = static_cast<double>(m - j) / static_cast<double>(m - j + 1);
    if (s.flags[j - 1] != 0)
      f *= factor;
    else
      g *= factor;
    cum_f[j - 1] = f;
    cum_g[j - 1] = g;
  }

  std::size_t r = 0;
  while (r < m) {
    std::size_t tie_end = r;  // last index sharing W_r
    while (tie_end + 1 < m && s.w[tie_end + 1] == s.w[r]) ++tie_end;
    const double g_before = r == 0 ? 1.0 : cum_g[r - 1];
    for (std::size_t j = r; j <= tie_end; ++j) {
      t.lifetime_surv[j] = cum_f[tie_end];
      t.censoring_surv_left[j] = g_before;
    }
    r = tie_end + 1;
  }
  return t;
}

namespace {

WwResult ww_weighted(const LocalSample& s, std::size_t k, const KaplanMeierTables& km,
                     bool weight_by_rank, bool spacing_form) {
  check_tail(s, k);
  const std::size_t m = s.size();

  // leading factor 1 / (m * (1 - Fhat(W_{m-k})))
  const double threshold_surv = km.lifetime_surv[m - k - 1];
  if (threshold_surv == 0.0) return {std::nullopt, true};

  const double log_threshold = std::log(s.w[m - k - 1]);
  bool degenerate = false;
  bool any_uncensored = false;
  double sum = 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    if (s.flags[m - j] == 0) continue;  // delta term vanishes
    any_uncensored = true;
    const double g_left = km.censoring_surv_left[m - j];
    if (g_left == 0.0) {  // cannot happen for in-sample left limits; guard anyway
      degenerate = true;
      continue;
    }
    const double log_excess = spacing_form
                                  ? std::log(s.w[m - j]) - std::log(s.w[m - j - 1])
                                  : std::log(s.w[m - j]) - log_threshold;
    const double weight = weight_by_rank ? static_cast<double>(j) : 1.0;
    sum += weight * log_excess / g_left;
  }
  if (!any_uncensored) degenerate = true;  // all of the top k censored: estimate 0

  const double value = sum / (static_cast<double>(m) * threshold_surv);
  return {value, degenerate};
}

}  // namespace

WwResult ww_km(const LocalSample& s, std::size_t k, const KaplanMeierTables& km) {
  return ww_weighted(s, k, km, /*weight_by_rank=*/false, /*spacing_form=*/false);
}

WwResult ww_km(const LocalSample& s, std::size_t k) {
  return ww_km(s, k, KaplanMeierTables::build(s));
}

WwResult ww_kl(const LocalSample& s, std::size_t k, const KaplanMeierTables& km,
               bool spacing_form) {
  return ww_weighted(s, k, km, /*weight_by_rank=*/true, spacing_form);
}

WwResult ww_kl(const LocalSample& s, std::size_t k, bool spacing_form) {
  return ww_kl(s, k, KaplanMeierTables::build(s), spacing_form);
}

std::vector<EstimateSeries> estimate_all(const LocalSample& s,
                                         std::span<const EstimatorKind> kinds,
                                         std::span<const std::size_t> k_grid,
                                         const EstimateOptions& options) {
  if (kinds.empty()) throw std::invalid_argument("estimate_all: no estimator kinds requested");
  if (k_grid.empty()) throw std::invalid_argument("estimate_all: empty k grid");
  const std::size_t m = s.size();
  for (std::size_t k : k_grid)
    if (k < 1 || k + 1 > m)
      throw std::invalid_argument("estimate_all: k grid entry outside [1, m-1]");

  const bool needs_km =
      std::find(kinds.begin(), kinds.end(), EstimatorKind::ww_km) != kinds.end() ||
      std::find(kinds.begin(), kinds.end(), EstimatorKind::ww_kl) != kinds.end();
  KaplanMeierTables km;
  if (needs_km) km = KaplanMeierTables::build(s);

  std::vector<double> top_fraction(k_grid.size());
  for (std::size_t i = 0; i < k_grid.size(); ++i) top_fraction[i] = phat(s, k_grid[i]);

  std::vector<EstimateSeries> out;
  out.reserve(kinds.size());
  for (EstimatorKind kind : kinds) {
    EstimateSeries series;
    series.kind = kind;
    series.k_values.assign(k_grid.begin(), k_grid.end());
    series.phat.assign(top_fraction.begin(), top_fraction.end());
    series.estimates.resize(k_grid.size());
    series.degenerate.assign(k_grid.size(), 0);

    for (std::size_t i = 0; i < k_grid.size(); ++i) {
      const std::size_t k = k_grid[i];
      std::optional<double> raw;
      bool internally_adapted = false;
      switch (kind) {
        case EstimatorKind::hill: raw = hill(s, k); break;
        case EstimatorKind::mom: raw = moment(s, k); break;
        case EstimatorKind::gh:
          if (k + 2 <= m) raw = gh(s, k);  // needs one extra order statistic
          break;
        case EstimatorKind::zipf: raw = zipf(s, k); break;
        case EstimatorKind::momr: raw = momr(s, k); break;
        case EstimatorKind::pmom: raw = pmom(s, k); break;
        case EstimatorKind::ppd: {
          if (k >= 3) {
            const auto fit = fit_ppd(relative_excesses(s, k), std::nullopt, options.ppd);
            if (fit.converged) raw = fit.params.gamma;
          }
          break;
        }
        case EstimatorKind::ww_km: {
          const WwResult r = ww_km(s, k, km);
          series.estimates[i] = r.value;
          series.degenerate[i] = r.degenerate ? 1 : 0;
          internally_adapted = true;
          break;
        }
        case EstimatorKind::ww_kl: {
          const WwResult r = ww_kl(s, k, km, options.ww_kl_spacing_form);
          series.estimates[i] = r.value;
          series.degenerate[i] = r.degenerate ? 1 : 0;
          internally_adapted = true;
          break;
        }
      }
      if (!internally_adapted && raw)
        series.estimates[i] = adapt(*raw, top_fraction[i]);
    }
    out.push_back(std::move(series));
  }
  return out;
}

}  // namespace cevi
