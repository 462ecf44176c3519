#pragma once

#include <cstdint>
#include <vector>

#include "cevi/sampling.hpp"

namespace cevi {

// Closed Euclidean ball around a covariate point of interest.
struct Window {
  std::vector<double> center;
  double radius = 0.0;
};

// Observations whose covariates fall inside a window, sorted ascending by z
// with the censoring flags permuted alongside. phi is the fraction of the
// parent design inside the ball, so size() == phi * n.
struct LocalSample {
  std::vector<double> w;
  std::vector<std::uint8_t> flags;
  double phi = 0.0;

  std::size_t size() const { return w.size(); }
};

// Extracts the local sample for `window`. Points at distance exactly equal to
// the radius are included. Tied z values are ordered uncensored-first, the
// usual survival convention for event/censoring ties. An empty result is
// valid; estimators reject it downstream.
LocalSample select_window(const Dataset& data, const Window& window);

}  // namespace cevi
