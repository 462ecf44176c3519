#include "cevi/ppd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "cevi/nelder_mead.hpp"
#include "cevi/window.hpp"

namespace cevi {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTieNudge = 1e-12;

// Compact maximum-likelihood search box. The constraint set c in (-1/tau, 1),
// tau > 0 contains a degenerate ridge (tau -> 0 with c -> -1/tau mimics a
// log-tilted Pareto), on which the fitted gamma drifts badly; restricting the
// search to the usual second-order range removes it. The box brackets the
// tau values implied by the simulated families (Burr: 2, Pareto-type: O(1)).
constexpr double kTauSearchLo = 0.19;
constexpr double kTauSearchHi = 3.2;
constexpr double kCSearchLo = -0.505;
constexpr double kCSearchHi = 0.905;

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double logit(double p) {
  const double clamped = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
  return std::log(clamped / (1.0 - clamped));
}

double tau_from_theta(double t) {
  return kTauSearchLo * std::exp(std::log(kTauSearchHi / kTauSearchLo) * sigmoid(t));
}

double theta_from_tau(double tau) {
  const double clamped = std::min(std::max(tau, kTauSearchLo * 1.0001), kTauSearchHi * 0.9999);
  return logit(std::log(clamped / kTauSearchLo) / std::log(kTauSearchHi / kTauSearchLo));
}

double c_lower(double tau) { return std::max(-1.0 / tau, kCSearchLo); }

double c_from_theta(double t, double tau) {
  const double lo = c_lower(tau);
  return lo + (kCSearchHi - lo) * sigmoid(t);
}

double theta_from_c(double c, double tau) {
  const double lo = c_lower(tau);
  return logit((c - lo) / (kCSearchHi - lo));
}

// log likelihood given precomputed log excesses; no validity checks
double loglik_from_logs(const PpdParams& p, std::span<const double> log_v) {
  const double a_exp = -1.0 / p.gamma - 1.0;
  const double b_exp = a_exp - p.tau;
  const double a_coef = (1.0 - p.c) / p.gamma;
  const double b_coef = p.c * (1.0 / p.gamma + p.tau);
  double sum = 0.0;
  for (double lv : log_v) {
    const double density = a_coef * std::exp(a_exp * lv) + b_coef * std::exp(b_exp * lv);
    if (!(density > 0.0)) return kNegInf;
    sum += std::log(density);
  }
  return sum;
}

}  // namespace

bool PpdParams::valid() const {
  return gamma > 0.0 && tau > 0.0 && c > -1.0 / tau && c < 1.0;
}

double ppd_survival(const PpdParams& p, double w) {
  return (1.0 - p.c) * std::pow(w, -1.0 / p.gamma) +
         p.c * std::pow(w, -(1.0 / p.gamma + p.tau));
}

double ppd_density(const PpdParams& p, double w) {
  return (1.0 - p.c) / p.gamma * std::pow(w, -1.0 / p.gamma - 1.0) +
         p.c * (1.0 / p.gamma + p.tau) * std::pow(w, -1.0 / p.gamma - p.tau - 1.0);
}

std::vector<double> relative_excesses(const LocalSample& s, std::size_t k) {
  const std::size_t m = s.size();
  if (m < 2) throw std::domain_error("local sample too small");
  if (k < 1 || k + 1 > m) throw std::domain_error("k out of range for this sample");
  const double threshold = s.w[m - k - 1];
  if (!(threshold > 0.0)) throw std::domain_error("observations must be strictly positive");
  std::vector<double> v(k);
  for (std::size_t j = 1; j <= k; ++j) v[j - 1] = s.w[m - j] / threshold;
  return v;
}

double ppd_loglik(const PpdParams& params, std::span<const double> v) {
  if (!params.valid()) throw std::domain_error("invalid perturbed-Pareto parameters");
  std::vector<double> log_v(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] > 1.0)) throw std::domain_error("excesses must be > 1");
    log_v[i] = std::log(v[i]);
  }
  return loglik_from_logs(params, log_v);
}

FitResult fit_ppd(std::span<const double> v, std::optional<PpdParams> start,
                  const PpdFitOptions& options) {
  if (v.size() < 3) throw std::invalid_argument("fit_ppd needs at least 3 excesses");

  std::vector<double> log_v(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 1.0)) throw std::invalid_argument("fit_ppd: excesses must be >= 1");
    log_v[i] = std::log(v[i] == 1.0 ? 1.0 + kTieNudge : v[i]);
  }

  // Hill estimate on the excesses: exact MLE of the c = 0 submodel
  const double hill_gamma =
      std::max(std::accumulate(log_v.begin(), log_v.end(), 0.0) / double(log_v.size()), 1e-8);
  const double tau0 = options.fix_tau.value_or(1.0);

  std::vector<PpdParams> starts;
  if (options.fix_c_zero) {
    starts.push_back({hill_gamma, 0.0, tau0});
  } else {
    if (start) starts.push_back(*start);
    for (double c0 : {-0.1, 0.1, 0.5}) starts.push_back({hill_gamma, c0, tau0});
  }

  NelderMeadOptions nm;
  nm.rel_tol = options.rel_tol;
  nm.max_iterations = options.max_iterations;

  FitResult best;
  best.loglik = kNegInf;

  for (const PpdParams& s0 : starts) {
    std::vector<double> theta0;
    // active coordinates: log gamma [, squashed c [, squashed tau]]
    theta0.push_back(std::log(std::max(s0.gamma, 1e-12)));
    PpdParams actual_start = s0;
    if (!options.fix_c_zero) {
      const double start_tau = options.fix_tau.value_or(
          std::min(std::max(s0.tau, kTauSearchLo * 1.0001), kTauSearchHi * 0.9999));
      const double start_c = std::min(std::max(s0.c, c_lower(start_tau) + 1e-6),
                                      kCSearchHi - 1e-6);
      theta0.push_back(theta_from_c(start_c, start_tau));
      if (!options.fix_tau) theta0.push_back(theta_from_tau(start_tau));
      actual_start.tau = start_tau;
      actual_start.c = start_c;
    } else {
      actual_start.c = 0.0;
      actual_start.tau = tau0;
    }

    auto unpack = [&](std::span<const double> theta) {
      PpdParams p;
      p.gamma = std::exp(theta[0]);
      if (options.fix_c_zero) {
        p.c = 0.0;
        p.tau = tau0;
      } else if (options.fix_tau) {
        p.tau = *options.fix_tau;
        p.c = c_from_theta(theta[1], p.tau);
      } else {
        p.tau = tau_from_theta(theta[2]);
        p.c = c_from_theta(theta[1], p.tau);
      }
      return p;
    };

    auto objective = [&](const std::vector<double>& theta) {
      const double ll = loglik_from_logs(unpack(theta), log_v);
      return ll == kNegInf ? std::numeric_limits<double>::infinity() : -ll;
    };

    const NelderMeadResult run = nelder_mead_minimize(objective, theta0, nm);
    const double ll = -run.value;
    if (ll > best.loglik) {
      best.params = unpack(run.x);
      best.loglik = ll;
      best.converged = run.converged;
      best.iterations = run.iterations;
      best.start = actual_start;
    }
  }
  return best;
}

}  // namespace cevi
