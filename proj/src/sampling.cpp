#include "cevi/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cevi/rng.hpp"

namespace cevi {

double gamma1_of(const CovariateModel& model, double x) {
  return std::exp(model.beta0 + model.beta1 * x);
}

double gamma2_of(const CensoringScheme& scheme, double gamma1) {
  const double p = scheme.p_noncensored;
  if (!(p > 0.0) || !(p < 1.0))
    throw std::domain_error("noncensored fraction p must lie in (0,1)");
  return gamma1 * p / (1.0 - p);
}

Triplet record(const Dataset& data, std::size_t i) {
  return Triplet{data.z[i], data.delta[i], data.covariate(i)};
}

Dataset sample_dataset(const CovariateModel& model, const CensoringScheme& scheme,
                       std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");

  auto design_rng = make_engine(hash_combine(seed, 0xc0f1a7e5u));
  auto lifetime_rng = make_engine(hash_combine(seed, 0x11f35u));
  auto censor_rng = make_engine(hash_combine(seed, 0xce45u));

  Dataset data;
  data.d = 1;
  data.z.resize(n);
  data.delta.resize(n);
  data.x.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const double x = uniform01(design_rng);
    const double g1 = gamma1_of(model, x);
    const double y = quantile(model.family, g1, uniform01(lifetime_rng), model.burr);

    double c = std::numeric_limits<double>::infinity();
    if (scheme.enabled) {
      const double g2 = gamma2_of(scheme, g1);
      c = quantile(scheme.family, g2, uniform01(censor_rng), scheme.burr);
    }

    data.x[i] = x;
    data.z[i] = std::min(y, c);
    data.delta[i] = y <= c ? 1 : 0;
  }
  return data;
}

}  // namespace cevi
