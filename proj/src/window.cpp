#include "cevi/window.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cevi {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

LocalSample select_window(const Dataset& data, const Window& window) {
  if (data.size() == 0) throw std::invalid_argument("select_window: dataset is empty");
  if (window.center.size() != data.d)
    throw std::invalid_argument("select_window: center dimension does not match dataset");
  if (!(window.radius > 0.0)) throw std::invalid_argument("select_window: radius must be > 0");

  const std::size_t n = data.size();
  const double r2 = window.radius * window.radius;
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < n; ++i) {
    // d = 1 avoids the squaring round-off at the ball boundary
    const bool in = data.d == 1
                        ? std::abs(data.x[i] - window.center[0]) <= window.radius
                        : squared_distance(data.covariate(i), window.center) <= r2;
    if (in) inside.push_back(i);
  }

  // ascending z; at ties the uncensored observation comes first
  std::stable_sort(inside.begin(), inside.end(), [&](std::size_t a, std::size_t b) {
    if (data.z[a] != data.z[b]) return data.z[a] < data.z[b];
    return data.delta[a] > data.delta[b];
  });

  LocalSample s;
  s.w.reserve(inside.size());
  s.flags.reserve(inside.size());
  for (std::size_t i : inside) {
    s.w.push_back(data.z[i]);
    s.flags.push_back(data.delta[i]);
  }
  s.phi = static_cast<double>(inside.size()) / static_cast<double>(n);
  return s;
}

}  // namespace cevi
