#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace cevi {

struct NelderMeadOptions {
  double rel_tol = 1e-8;
  int max_iterations = 500;
  double initial_step = 0.25;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

// Classic Nelder-Mead downhill simplex minimizer (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2). Terminates when the simplex function values
// agree to rel_tol in relative terms. -inf objective values are legal; such
// vertices are simply the worst.
template <typename F>
NelderMeadResult nelder_mead_minimize(F&& f, std::span<const double> x0,
                                      const NelderMeadOptions& opt = {}) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, std::vector<double>(x0.begin(), x0.end()));
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;

  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(pts[i]);

  std::vector<std::size_t> order(n + 1);
  auto sort_order = [&] {
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (fv[a] != fv[b]) return fv[a] < fv[b];
      return a < b;  // deterministic tie break
    });
  };

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  NelderMeadResult result;
  int iter = 0;
  bool converged = false;

  for (; iter < opt.max_iterations; ++iter) {
    sort_order();
    const double fbest = fv[order[0]];
    const double fworst = fv[order[n]];
    if (std::isfinite(fworst) &&
        std::abs(fworst - fbest) <= opt.rel_tol * (std::abs(fbest) + opt.rel_tol)) {
      converged = true;
      break;
    }

    // centroid of all but the worst vertex
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[order[i]][j] / double(n);

    auto blend = [&](std::vector<double>& out, double t) {
      const auto& worst = pts[order[n]];
      for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (centroid[j] - worst[j]);
    };

    blend(xr, 1.0);
    const double fr = f(xr);
    if (fr < fv[order[0]]) {
      blend(xe, 2.0);
      const double fe = f(xe);
      if (fe < fr) {
        pts[order[n]] = xe;
        fv[order[n]] = fe;
      } else {
        pts[order[n]] = xr;
        fv[order[n]] = fr;
      }
      continue;
    }
    if (fr < fv[order[n - 1]]) {
      pts[order[n]] = xr;
      fv[order[n]] = fr;
      continue;
    }

    // contraction, outside or inside of the worst vertex
    const bool outside = fr < fv[order[n]];
    blend(xc, outside ? 0.5 : -0.5);
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[order[n]])) {
      pts[order[n]] = xc;
      fv[order[n]] = fc;
      continue;
    }

    // shrink toward the best vertex
    const auto best = pts[order[0]];
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == order[0]) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = best[j] + 0.5 * (pts[i][j] - best[j]);
      fv[i] = f(pts[i]);
    }
  }

  sort_order();
  result.x = pts[order[0]];
  result.value = fv[order[0]];
  result.converged = converged;
  result.iterations = iter;
  return result;
}

}  // namespace cevi
