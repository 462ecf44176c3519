#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cevi {

struct LocalSample;

// Two-component Pareto mixture ("perturbed Pareto") with survival
//   S(w) = (1-c) w^{-1/gamma} + c w^{-(1/gamma + tau)},  w >= 1,
// gamma > 0, tau > 0, c in (-1/tau, 1).
struct PpdParams {
  double gamma = 0.5;
  double c = 0.0;
  double tau = 1.0;

  bool valid() const;
};

double ppd_survival(const PpdParams& p, double w);
double ppd_density(const PpdParams& p, double w);

// Relative excesses V_j = W_{m-j+1}/W_{m-k} of the k largest observations
// over the threshold order statistic, largest first. All values >= 1, with
// equality only when observations tie with the threshold.
std::vector<double> relative_excesses(const LocalSample& s, std::size_t k);

// Log likelihood of the excesses under the mixture density. Returns -inf when
// the density is nonpositive at some point (possible for c < 0 with large
// gamma). Throws std::domain_error for invalid params or excesses <= 1.
double ppd_loglik(const PpdParams& params, std::span<const double> v);

struct PpdFitOptions {
  std::optional<double> fix_tau;  // estimate tau unless set
  bool fix_c_zero = false;        // strict Pareto submodel; MLE is then the Hill estimate
  double rel_tol = 1e-8;
  int max_iterations = 500;
};

struct FitResult {
  PpdParams params{};
  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  PpdParams start{};
};

// Constrained maximum likelihood fit over (gamma, c, tau) by simplex descent
// on a transformed space (log gamma plus squashing maps for c and tau). The
// squashing keeps every iterate inside the constraint set c in (-1/tau, 1)
// and additionally confines the search to a compact box (tau in [0.19, 3.2],
// c in (-0.505, 0.905)) to stay off the tau -> 0, c -> -1/tau ridge, where
// the mixture degenerates and gamma becomes unidentifiable. Starts from the
// Hill estimate with c in {-0.1, 0.1, 0.5} (plus `start` when given, clamped
// into the box) and keeps the best run. Requires at least 3 excesses; ties
// at 1 are nudged to 1 + 1e-12 before evaluation.
FitResult fit_ppd(std::span<const double> v, std::optional<PpdParams> start = {},
                  const PpdFitOptions& options = {});

}  // namespace cevi
