#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cevi/distributions.hpp"

namespace cevi {

// Conditional EVI function gamma1(x) = exp(beta0 + beta1*x) and the lifetime
// family it parameterizes.
struct CovariateModel {
  double beta0 = -0.11;
  double beta1 = -2.90;
  Family family = Family::burr;
  BurrShape burr{};
};

double gamma1_of(const CovariateModel& model, double x);

// Censoring mechanism: the censoring variable C is drawn with index
// gamma2(x) = gamma1(x)*p/(1-p), where p is the fraction of noncensored
// observations in the tail. `enabled = false` makes C identically +infinity.
struct CensoringScheme {
  double p_noncensored = 0.9;
  Family family = Family::burr;
  BurrShape burr{};
  bool enabled = true;
};

// Throws std::domain_error unless 0 < p < 1.
double gamma2_of(const CensoringScheme& scheme, double gamma1);

// Observed records (z, delta, x), stored column-wise. Covariates are
// row-major with `d` entries per record; the simulation uses d = 1.
struct Dataset {
  std::vector<double> z;
  std::vector<std::uint8_t> delta;
  std::vector<double> x;
  std::size_t d = 1;

  std::size_t size() const { return z.size(); }
  std::span<const double> covariate(std::size_t i) const { return {x.data() + i * d, d}; }
};

// One observed triplet; view into a Dataset row (d = 1 convenience accessor
// uses x[0]).
struct Triplet {
  double z = 0.0;
  std::uint8_t delta = 1;
  std::span<const double> x{};
};

Triplet record(const Dataset& data, std::size_t i);

// Draws n triplets: x_i ~ Uniform(0,1), Y_i from the model family with
// gamma1(x_i), C_i from the censoring family with gamma2(x_i), then
// z = min(Y, C), delta = 1{Y <= C}. Covariate, lifetime and censoring draws
// come from three independent engines split off `seed`, so the same seed
// reproduces the dataset exactly.
Dataset sample_dataset(const CovariateModel& model, const CensoringScheme& scheme,
                       std::size_t n, std::uint64_t seed);

}  // namespace cevi
