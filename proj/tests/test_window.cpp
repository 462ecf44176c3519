#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>
#include <set>

#include "cevi/rng.hpp"
#include "cevi/window.hpp"

using namespace cevi;

namespace {

Dataset uniform_design(std::size_t n, std::uint64_t seed, double censored_share = 0.0) {
  std::mt19937_64 rng(seed);
  Dataset data;
  data.d = 1;
  for (std::size_t i = 0; i < n; ++i) {
    data.x.push_back(uniform01(rng));
    data.z.push_back(std::pow(uniform01(rng), -0.5));
    data.delta.push_back(uniform01(rng) < censored_share ? 0 : 1);
  }
  return data;
}

}  // namespace

TEST_CASE("a wide window captures the whole design") {
  const Dataset data = uniform_design(500, 1);
  const LocalSample s = select_window(data, Window{{0.5}, 0.6});
  CHECK(s.size() == data.size());
  CHECK(s.phi == 1.0);
  CHECK(std::is_sorted(s.w.begin(), s.w.end()));
}

TEST_CASE("a vanishing window is empty") {
  const Dataset data = uniform_design(100, 2);
  const LocalSample s = select_window(data, Window{{2.0}, 1e-12});
  CHECK(s.size() == 0);
  CHECK(s.phi == 0.0);
}

TEST_CASE("points at distance exactly the radius are included") {
  Dataset data;
  data.d = 1;
  data.x = {0.25, 0.75, 0.8125};
  data.z = {1.0, 2.0, 3.0};
  data.delta = {1, 1, 1};
  // center 0.5, radius 0.25: both 0.25 and 0.75 sit on the boundary
  const LocalSample s = select_window(data, Window{{0.5}, 0.25});
  CHECK(s.size() == 2);
  CHECK(s.w == std::vector<double>{1.0, 2.0});
}

TEST_CASE("flags travel with their observations through the sort") {
  const Dataset data = uniform_design(400, 3, 0.4);
  const Window window{{0.5}, 0.1};
  const LocalSample s = select_window(data, window);

  std::multiset<std::pair<double, int>> expected, actual;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (std::abs(data.x[i] - 0.5) <= 0.1) expected.insert({data.z[i], data.delta[i]});
  for (std::size_t i = 0; i < s.size(); ++i) actual.insert({s.w[i], s.flags[i]});
  CHECK(expected == actual);
  CHECK(std::is_sorted(s.w.begin(), s.w.end()));
  CHECK(s.phi == doctest::Approx(double(s.size()) / double(data.size())));
}

TEST_CASE("window size is monotone in the radius") {
  const Dataset data = uniform_design(300, 4);
  std::size_t previous = 0;
  for (double h : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    const LocalSample s = select_window(data, Window{{0.4}, h});
    CHECK(s.size() >= previous);
    previous = s.size();
  }
}

TEST_CASE("tied observation times put uncensored first") {
  Dataset data;
  data.d = 1;
  data.x = {0.5, 0.5, 0.5, 0.5};
  data.z = {2.0, 2.0, 1.0, 2.0};
  data.delta = {0, 1, 1, 0};
  const LocalSample s = select_window(data, Window{{0.5}, 0.1});
  CHECK(s.w == std::vector<double>{1.0, 2.0, 2.0, 2.0});
  CHECK(s.flags == std::vector<std::uint8_t>{1, 1, 0, 0});
}

TEST_CASE("window count concentrates around the binomial mean") {
  // n=2000, h=0.05 at an interior point: phi should be near 0.10
  int in_range = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset data = uniform_design(2000, 1000 + seed);
    const LocalSample s = select_window(data, Window{{0.5}, 0.05});
    if (s.phi >= 0.07 && s.phi <= 0.13) ++in_range;
  }
  CHECK(in_range == 100);

  // and m in [140, 260] for at least 95 of 100 seeds at x* = 0.37
  int m_in_range = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Dataset data = uniform_design(2000, 5000 + seed);
    const LocalSample s = select_window(data, Window{{0.37}, 0.05});
    if (s.size() >= 140 && s.size() <= 260) ++m_in_range;
  }
  CHECK(m_in_range >= 95);
}

TEST_CASE("two-dimensional covariates use the Euclidean ball") {
  Dataset data;
  data.d = 2;
  data.x = {0.0, 0.0, 0.3, 0.4, 0.3, 0.5, 1.0, 1.0};  // distances 0, 0.5, ~0.583, ~1.41
  data.z = {1.0, 2.0, 3.0, 4.0};
  data.delta = {1, 1, 1, 1};
  const LocalSample s = select_window(data, Window{{0.0, 0.0}, 0.5});
  CHECK(s.size() == 2);  // the 3-4-5 point sits exactly on the boundary
  CHECK(s.phi == doctest::Approx(0.5));
}

TEST_CASE("select_window validates its arguments") {
  Dataset empty;
  CHECK_THROWS_AS(select_window(empty, Window{{0.5}, 0.1}), std::invalid_argument);
  const Dataset data = uniform_design(10, 5);
  CHECK_THROWS_AS(select_window(data, Window{{0.5, 0.5}, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(select_window(data, Window{{0.5}, 0.0}), std::invalid_argument);
}
