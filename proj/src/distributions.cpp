#include "cevi/distributions.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace cevi {

const char* to_string(Family f) {
  switch (f) {
    case Family::burr: return "burr";
    case Family::pareto: return "pareto";
    case Family::frechet: return "frechet";
  }
  throw std::logic_error("unknown family");
}

Family parse_family(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "burr") return Family::burr;
  if (s == "pareto") return Family::pareto;
  if (s == "frechet" || s == "fréchet") return Family::frechet;
  throw std::invalid_argument("unknown family '" + name + "' (expected burr, pareto or frechet)");
}

namespace {

void check_args(double gamma, const BurrShape& shape) {
  if (!(gamma > 0.0)) throw std::domain_error("gamma must be > 0");
  if (!(shape.eta > 0.0) || !(shape.tau > 0.0))
    throw std::domain_error("Burr shape parameters must be > 0");
}

}  // namespace

double quantile(Family f, double gamma, double u, const BurrShape& shape) {
  check_args(gamma, shape);
  if (!(u > 0.0) || !(u < 1.0)) throw std::domain_error("quantile argument u must lie in (0,1)");
  const double v = 1.0 - u;
  switch (f) {
    case Family::burr: {
      const double lambda = 1.0 / (shape.tau * gamma);
      return std::pow(shape.eta * (std::pow(v, -1.0 / lambda) - 1.0), 1.0 / shape.tau);
    }
    case Family::pareto:
      return std::pow(v, -gamma);
    case Family::frechet:
      return std::pow(-std::log(u), -gamma);
  }
  throw std::logic_error("unknown family");
}

double cdf(Family f, double gamma, double y, const BurrShape& shape) {
  check_args(gamma, shape);
  switch (f) {
    case Family::burr: {
      if (y <= 0.0) return 0.0;
      const double lambda = 1.0 / (shape.tau * gamma);
      return 1.0 - std::pow(shape.eta / (shape.eta + std::pow(y, shape.tau)), lambda);
    }
    case Family::pareto:
      if (y <= 1.0) return 0.0;
      return 1.0 - std::pow(y, -1.0 / gamma);
    case Family::frechet:
      if (y <= 0.0) return 0.0;
      return std::exp(-std::pow(y, -1.0 / gamma));
  }
  throw std::logic_error("unknown family");
}

}  // namespace cevi
