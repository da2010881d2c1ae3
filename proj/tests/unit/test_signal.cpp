#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "propimg/signal.hpp"
#include "test_util.hpp"

using namespace propimg;
using testutil::error_code_of;

TEST_CASE("normalize_global examples") {
  CHECK(normalize_global(12.0, {2, 12}) == 1.0);
  CHECK(normalize_global(7.0, {2, 12}) == 0.0);
  CHECK(normalize_global(3.0, {0, 10}) == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(normalize_global(-3.0, {-3, 5}) == -1.0);
}

TEST_CASE("normalize_global clips overshoot and is monotone inside bounds") {
  const GlobalBounds b{-2.0, 6.0};
  CHECK(normalize_global(100.0, b) == 1.0);
  CHECK(normalize_global(-100.0, b) == -1.0);
  double prev = -2.0;
  for (int k = 1; k <= 200; ++k) {
    const double s = -2.0 + 8.0 * k / 200.0;
    CHECK(normalize_global(s, b) > normalize_global(prev, b));
    prev = s;
  }
  const auto v = normalize_global(Window{-2, 6, 2, 10}, b);
  CHECK(v == std::vector<double>{-1, 1, 0, 1});
}

TEST_CASE("normalize_global errors") {
  CHECK(error_code_of([] { normalize_global(Window{1, 2, 3, 4}, {5, 5}); }) ==
        ErrorCode::DegenerateBounds);
  CHECK(error_code_of([] { normalize_global(1.0, {3, 1}); }) == ErrorCode::DegenerateBounds);
  CHECK(error_code_of([] { Window{1, std::nan(""), 3, 4}; }) == ErrorCode::NonFiniteInput);
  CHECK(error_code_of([] {
          Window{1, std::numeric_limits<double>::infinity(), 3, 4};
        }) == ErrorCode::NonFiniteInput);
}

TEST_CASE("compute_local_range examples") {
  EncoderConfig cfg;
  std::vector<double> ramp(21);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const auto r = compute_local_range(Window(ramp), cfg);
  CHECK(r.min == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(r.max == doctest::Approx(18.8).epsilon(1e-12));

  const auto c = compute_local_range(Window(std::vector<double>(10, 5.0)), cfg);
  CHECK(c.min == 5.0);
  CHECK(c.max == 5.0);

  EncoderConfig no_margin;
  no_margin.range_margin = 0.0;
  const auto alt = compute_local_range(Window{0, 10, 0, 10, 0, 10, 0, 10, 0, 10}, no_margin);
  CHECK(alt.min == 0.0);
  CHECK(alt.max == 10.0);
}

TEST_CASE("compute_local_range is translation-equivariant") {
  std::mt19937_64 rng(11);
  EncoderConfig cfg;
  for (int t = 0; t < 200; ++t) {
    const auto x = testutil::random_window(rng, 10, -5, 5);
    const double c = std::uniform_real_distribution<double>(-100, 100)(rng);
    auto y = x;
    for (auto& v : y) v += c;
    const auto a = compute_local_range(Window(x), cfg);
    const auto b = compute_local_range(Window(y), cfg);
    CHECK(std::abs(b.min - a.min - c) <= 1e-9);
    CHECK(std::abs(b.max - a.max - c) <= 1e-9);
    CHECK(a.max >= a.min);
  }
}

TEST_CASE("percentile_sorted uses linear interpolation") {
  const std::vector<double> v{1, 2, 3, 4};
  CHECK(percentile_sorted(v, 0.0) == 1.0);
  CHECK(percentile_sorted(v, 1.0) == 4.0);
  CHECK(percentile_sorted(v, 0.5) == doctest::Approx(2.5));
  CHECK(percentile_sorted(v, 0.1) == doctest::Approx(1.3));
}

TEST_CASE("compute_deviation examples") {
  const auto d1 = compute_deviation({-0.5, 0.5}, {-1, 1});
  CHECK(d1.delta_min == doctest::Approx(-0.5));
  CHECK(d1.delta_max == doctest::Approx(0.5));
  const auto d2 = compute_deviation({4, 9}, {0, 10});
  CHECK(d2.delta_min == doctest::Approx(-0.2));
  CHECK(d2.delta_max == doctest::Approx(0.8));
  CHECK(error_code_of([] { compute_deviation({0, 1}, {2, 2}); }) ==
        ErrorCode::DegenerateBounds);
}

TEST_CASE("compute_deviation of the full range is (-1, 1)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1000, 1000);
  for (int t = 0; t < 500; ++t) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const auto d = compute_deviation({a, b}, {a, b});
    CHECK(d.delta_min == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(d.delta_max == doctest::Approx(1.0).epsilon(1e-12));
  }
  // Deviations outside the bounds are left unclipped.
  const auto wide = compute_deviation({-3, 3}, {-1, 1});
  CHECK(wide.delta_min == doctest::Approx(-3.0));
  CHECK(wide.delta_max == doctest::Approx(3.0));
}

TEST_CASE("EncoderConfig validation") {
  EncoderConfig ok;
  CHECK_NOTHROW(ok.validate());
  auto bad = [](auto mutate) {
    EncoderConfig c;
    mutate(c);
    return error_code_of([&] { c.validate(); });
  };
  CHECK(bad([](EncoderConfig& c) { c.window_w = 3; }) == ErrorCode::InvalidConfig);
  CHECK(bad([](EncoderConfig& c) { c.epsilon = 0; }) == ErrorCode::InvalidConfig);
  CHECK(bad([](EncoderConfig& c) { c.spike_alpha = 0; }) == ErrorCode::InvalidConfig);
  CHECK(bad([](EncoderConfig& c) { c.percentile_lo = 0.9; }) == ErrorCode::InvalidConfig);
  CHECK(bad([](EncoderConfig& c) { c.percentile_hi = 1.5; }) == ErrorCode::InvalidConfig);
  CHECK(bad([](EncoderConfig& c) { c.range_margin = -0.1; }) == ErrorCode::InvalidConfig);
}

TEST_CASE("morphology constants") {
  CHECK(contact_bit(Leg::LF) == 8u);
  CHECK(contact_bit(Leg::RF) == 4u);
  CHECK(contact_bit(Leg::LH) == 2u);
  CHECK(contact_bit(Leg::RH) == 1u);
  CHECK(to_string(Leg::RH) == "RH");
  CHECK(to_string(Joint::KFE) == "KFE");
  CHECK(to_string(Axis::Y) == "Y");
}
