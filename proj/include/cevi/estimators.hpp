#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cevi/ppd.hpp"
#include "cevi/window.hpp"

namespace cevi {

enum class EstimatorKind { hill, mom, gh, zipf, momr, pmom, ppd, ww_km, ww_kl };

inline constexpr EstimatorKind all_estimator_kinds[] = {
    EstimatorKind::hill, EstimatorKind::mom,  EstimatorKind::gh,
    EstimatorKind::zipf, EstimatorKind::momr, EstimatorKind::pmom,
    EstimatorKind::ppd,  EstimatorKind::ww_km, EstimatorKind::ww_kl};

const char* to_string(EstimatorKind k);
EstimatorKind parse_estimator_kind(const std::string& name);

// All tail statistics below read the k largest of the m window observations
// W_1 <= ... <= W_m (s.w, ascending, strictly positive). Shared domain:
// 1 <= k <= m-1 (gh needs k <= m-2); violations throw std::domain_error.
// Estimators whose formula degenerates on the given sample return nullopt.

// (1/k) sum_{i=1..k} i*(log W_{m-i+1} - log W_{m-i}); identical to the mean
// of log excesses over the threshold W_{m-k}.
double hill(const LocalSample& s, std::size_t k);

// M^(j): (1/k) sum_{i=1..k} (log W_{m-i+1} - log W_{m-k})^j, j in {1,2}.
double log_moment(const LocalSample& s, std::size_t k, int order);

// M1 + 1 - 1/2 * (1 - M1^2/M2)^{-1}; nullopt when M2 = 0 or M1^2 = M2.
std::optional<double> moment(const LocalSample& s, std::size_t k);

// Generalised Hill: mean of log UH_{j,m} over j = 1..k minus log UH_{k+1,m},
// with UH_{j,m} = W_{m-j} * (mean of top-j log excesses over W_{m-j}).
double gh(const LocalSample& s, std::size_t k);

// Weighted least-squares smoother of the Hill estimator:
// sum_i i*log(W_{m-i+1}/W_{m-i})*log(k/i) / sum_i log(k/i); nullopt at k = 1.
std::optional<double> zipf(const LocalSample& s, std::size_t k);

// Moment ratio M2/(2*M1); nullopt when M1 = 0.
std::optional<double> momr(const LocalSample& s, std::size_t k);

// Peng's variant: M2/(2*M1) + 1 - 1/2 * (1 - M1^2/M2)^{-1}.
std::optional<double> pmom(const LocalSample& s, std::size_t k);

// Fraction of noncensored observations among the k largest.
double phat(const LocalSample& s, std::size_t k);

// Inverse probability-of-censoring adaptation raw/phat; nullopt when the
// entire top k is censored (phat = 0).
std::optional<double> adapt(double raw, double phat_value);

enum class SurvivalTarget { lifetime, censoring };  // F resp. G

// Kaplan-Meier survival 1-Fhat(b) (resp. 1-Ghat(b)): product over
// {j : W_j <= b} of ((m-j)/(m-j+1))^{e_j} with e_j = delta_j for F and
// 1-delta_j for G. Requires b < W_m.
double km_survival(const LocalSample& s, double b, SurvivalTarget which);

// Left-limit variant using strict inequality W_j < b, i.e. the value of
// 1-Fhat (resp. 1-Ghat) just below b. Requires b <= W_m.
double km_survival_left(const LocalSample& s, double b, SurvivalTarget which);

// Both Kaplan-Meier survival curves evaluated once per sample; reused across
// k and across the two Worms-Worms estimators. Immutable after build().
struct KaplanMeierTables {
  std::vector<double> lifetime_surv;        // 1-Fhat(W_j), 0-based j
  std::vector<double> censoring_surv_left;  // 1-Ghat(W_j^-), 0-based j

  static KaplanMeierTables build(const LocalSample& s);
};

// Worms-Worms estimates carry a degeneracy mark: `degenerate` is set when
// zero-denominator terms had to be dropped or the whole top k is censored
// (value 0 in that case). A nullopt value means the leading Kaplan-Meier
// factor itself vanished.
struct WwResult {
  std::optional<double> value;
  bool degenerate = false;
};

// Kaplan-Meier weighted Hill form:
// [m*(1-Fhat(W_{m-k}))]^{-1} sum_j delta_{m-j+1}/(1-Ghat(W_{m-j+1}^-)) *
//   log(W_{m-j+1}/W_{m-k}).
// The prefactor uses the window size m so that the estimator reduces exactly
// to hill() when nothing is censored.
WwResult ww_km(const LocalSample& s, std::size_t k);
WwResult ww_km(const LocalSample& s, std::size_t k, const KaplanMeierTables& km);

// Weighted companion of ww_km with the j-th summand multiplied by j. With
// `spacing_form` the weight applies to the consecutive spacing
// log(W_{m-j+1}/W_{m-j}) instead of the cumulative excess.
WwResult ww_kl(const LocalSample& s, std::size_t k, bool spacing_form = false);
WwResult ww_kl(const LocalSample& s, std::size_t k, const KaplanMeierTables& km,
               bool spacing_form = false);

struct EstimateOptions {
  bool ww_kl_spacing_form = false;
  PpdFitOptions ppd{};
};

// Per-k estimates for one estimator on one local sample. `estimates` holds
// the censoring-adapted value for the plain tail estimators (raw/phat) and
// the unadapted value for ww_km/ww_kl, which handle censoring internally.
struct EstimateSeries {
  EstimatorKind kind{};
  std::vector<std::size_t> k_values;
  std::vector<std::optional<double>> estimates;
  std::vector<double> phat;
  std::vector<std::uint8_t> degenerate;
};

// Evaluates every requested estimator over the k grid. k values must lie in
// [1, m-1]; kinds and k_grid must be nonempty. Undefined values propagate as
// missing entries, never as numeric sentinels.
std::vector<EstimateSeries> estimate_all(const LocalSample& s,
                                         std::span<const EstimatorKind> kinds,
                                         std::span<const std::size_t> k_grid,
                                         const EstimateOptions& options = {});

}  // namespace cevi
