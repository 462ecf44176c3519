#pragma once

#include <string>

namespace cevi {

enum class Family { burr, pareto, frechet };

const char* to_string(Family f);
Family parse_family(const std::string& name);

// Burr first shape tau and scale eta; the second shape lambda is tied to the
// extreme value index by lambda = 1/(tau*gamma), so all three families are
// parameterized here by gamma alone plus this fixed shape block.
struct BurrShape {
  double eta = 1.0;
  double tau = 2.0;

  friend bool operator==(const BurrShape&, const BurrShape&) = default;
};

// Inverse CDF at u in (0,1) for a Pareto-type family with extreme value index
// gamma > 0.
//   Burr:    ((1-u)^{-1/lambda} - 1)^{1/tau} * eta^{1/tau},  lambda = 1/(tau*gamma)
//   Pareto:  (1-u)^{-gamma}
//   Frechet: (-log u)^{-gamma}
// Throws std::domain_error when u is outside (0,1) or gamma <= 0.
double quantile(Family f, double gamma, double u, const BurrShape& shape = {});

// CDF companion of quantile(); same parameter checks.
double cdf(Family f, double gamma, double y, const BurrShape& shape = {});

}  // namespace cevi
