#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "propimg/encoders.hpp"
#include "reference_encoders.hpp"
#include "test_util.hpp"

using namespace propimg;
using testutil::error_code_of;

namespace {

std::vector<std::uint8_t> pixels_of(const SubImage& s) {
  return {s.pixels.bytes().begin(), s.pixels.bytes().end()};
}

EncoderConfig cfg_w(std::size_t w) {
  EncoderConfig c;
  c.window_w = w;
  return c;
}

}  // namespace

TEST_CASE("quantize_to_u8") {
  const std::vector<double> half(16, 0.5);
  const auto flat = quantize_to_u8(half, 4, QuantizeMode::MinMax, SubImageKind::SlopeDynamics);
  for (auto p : flat.pixels.bytes()) CHECK(p == 0);

  const std::vector<double> pm{1.0, 0.0, -1.0, 7.0};
  const auto a = quantize_to_u8(pm, 2, QuantizeMode::AffinePm1, SubImageKind::GafPolar);
  CHECK(a.at(0, 0) == 255);
  CHECK(a.at(0, 1) == 128);
  CHECK(a.at(1, 0) == 0);
  CHECK(a.at(1, 1) == 255);

  const std::vector<double> ramp{0.0, 1.0, 2.0, 3.0};
  const auto m = quantize_to_u8(ramp, 2, QuantizeMode::MinMax, SubImageKind::SlopeDynamics);
  CHECK(pixels_of(m) == std::vector<std::uint8_t>{0, 85, 170, 255});

  const std::vector<double> bad{0.0, std::nan(""), 1.0, 2.0};
  CHECK(error_code_of([&] {
          quantize_to_u8(bad, 2, QuantizeMode::MinMax, SubImageKind::SlopeDynamics);
        }) == ErrorCode::NonFiniteInput);
  CHECK(round_half_up(127.5) == 128.0);
  CHECK(round_half_up(0.49999) == 0.0);
}

// ---------------------------------------------------------------------------

TEST_CASE("slope dynamics: constant window") {
  const auto [img, f] = encode_slope_dynamics(Window(std::vector<double>(8, 1.0)), cfg_w(8));
  CHECK(f.slope_hat == 0.0);
  CHECK(f.jerk_hat == 0.0);
  CHECK(f.peak_density == 0.0);
  CHECK(f.ripple_freq == 2);
  CHECK(f.center_x == 3);
  CHECK(f.center_y == 7);
  CHECK(f.sigma_g == doctest::Approx(8 / 6.25));
  CHECK(img.at(7, 3) == 255);  // Gaussian peak at the center
}

TEST_CASE("slope dynamics: ramp 0..9") {
  std::vector<double> ramp(10);
  std::iota(ramp.begin(), ramp.end(), 0.0);
  const auto f = slope_features(Window(ramp), cfg_w(10));
  CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.slope_hat == doctest::Approx(0.34815531069927447).epsilon(1e-12));
  CHECK(f.jerk_hat == 0.0);
  CHECK(f.center_x == 6);
  CHECK(f.center_y == 9);
  CHECK(f.ripple_freq == 2);
}

TEST_CASE("slope dynamics: alternating window") {
  const auto f = slope_features(Window{0, 1, 0, 1, 0, 1}, cfg_w(6));
  CHECK(f.peak_count == 2);
  CHECK(f.peak_density == 1.0);
  CHECK(f.ripple_freq == 8);
  CHECK(f.slope_hat == doctest::Approx(0.171428568).epsilon(1e-8));
  CHECK(f.jerk_hat == 1.0);
  CHECK(f.center_x == 2);
  CHECK(f.center_y == 0);
}

TEST_CASE("slope dynamics: plateaus are not peaks") {
  const auto f = slope_features(Window{0, 1, 1, 0, 0, 0}, cfg_w(6));
  CHECK(f.peak_count == 0);
}

TEST_CASE("slope dynamics: shift invariance and feature ranges") {
  std::mt19937_64 rng(3);
  for (std::size_t w : {4u, 6u, 10u, 16u, 32u}) {
    for (int t = 0; t < 200; ++t) {
      // Integer-valued windows keep the shift exact in floating point.
      std::vector<double> x(w);
      std::uniform_int_distribution<int> d(-50, 50);
      for (auto& v : x) v = d(rng);
      auto y = x;
      for (auto& v : y) v += 1024.0;
      const auto [a, fa] = encode_slope_dynamics(Window(x), cfg_w(w));
      const auto [b, fb] = encode_slope_dynamics(Window(y), cfg_w(w));
      CHECK(a == b);
      CHECK(fa.center_x == fb.center_x);
      CHECK(fa.center_x < w);
      CHECK(fa.center_y < w);
      CHECK(fa.slope_hat >= -1.0);
      CHECK(fa.slope_hat <= 1.0);
      CHECK(fa.jerk_hat >= 0.0);
      CHECK(fa.jerk_hat <= 1.0);
      CHECK(fa.ripple_freq >= 2);
      CHECK(fa.ripple_freq <= 8);
    }
  }
}

TEST_CASE("slope dynamics: errors") {
  CHECK(error_code_of([] { encode_slope_dynamics(Window{1, 2, 3}, cfg_w(3)); }) ==
        ErrorCode::WindowTooShort);
}

// ---------------------------------------------------------------------------

TEST_CASE("spike patterns: constant window") {
  const auto [img, s] = encode_spike_patterns(Window(std::vector<double>(8, 5.0)), cfg_w(8));
  for (auto p : img.pixels.bytes()) CHECK(p == 128);
  CHECK(s.gated_count == 0);
  CHECK(s.mad_x == doctest::Approx(1e-8));
}

TEST_CASE("spike patterns: six-sample example") {
  EncoderConfig cfg = cfg_w(6);
  cfg.spike_alpha = 1.0;
  const auto [img, s] = encode_spike_patterns(Window{0, 0, 10, 0, 0, 20}, cfg);
  CHECK(s.median_delta == 10.0);
  CHECK(s.mad_delta == 10.0);
  CHECK(s.gated_count == 18);
  CHECK(img.at(0, 5) == 170);
  CHECK(img.at(2, 3) == 43);
  CHECK(img.at(0, 2) == 128);
  CHECK(img.at(5, 0) == 1);
  const std::vector<std::uint8_t> expected{
      128, 128, 128, 128, 128, 170,  //
      128, 128, 128, 128, 128, 170,  //
      43,  43,  128, 43,  43,  128,  //
      128, 128, 128, 128, 128, 170,  //
      128, 128, 128, 128, 128, 170,  //
      1,   1,   43,  1,   1,   128};
  CHECK(pixels_of(img) == expected);
}

TEST_CASE("spike patterns: step window degenerates MAD_delta") {
  EncoderConfig cfg = cfg_w(8);
  cfg.spike_alpha = 1.0;
  const auto [img, s] = encode_spike_patterns(Window{0, 0, 0, 0, 10, 10, 10, 10}, cfg);
  CHECK(s.gated_count == 32);
  CHECK(s.median_delta == 10.0);
  CHECK(s.mad_delta == 1e-8);
  for (std::size_t r = 0; r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      // Upper triangle scores Z = 0; the mirrored entries sit 2e9 MADs below.
      const std::uint8_t want = (r >= 4 && c < 4) ? 1 : 128;
      CHECK(img.at(r, c) == want);
    }
  }
}

TEST_CASE("spike patterns: gate symmetry and ungated diagonal") {
  std::mt19937_64 rng(17);
  for (std::size_t w : {6u, 10u, 16u}) {
    for (int t = 0; t < 200; ++t) {
      const auto x = testutil::random_window(rng, w);
      const auto [img, s] = encode_spike_patterns(Window(x), cfg_w(w));
      std::size_t gated = 0;
      for (std::size_t i = 0; i < w; ++i) {
        CHECK(img.at(i, i) == 128);
        for (std::size_t j = 0; j < w; ++j) {
          const bool gij = std::abs(x[j] - x[i]) > s.threshold;
          const bool gji = std::abs(x[i] - x[j]) > s.threshold;
          CHECK(gij == gji);
          gated += gij;
          if (!gij) CHECK(img.at(i, j) == 128);
        }
      }
      CHECK(gated == s.gated_count);
      CHECK(s.gated_count <= w * (w - 1));
      CHECK(s.threshold == doctest::Approx(3.0 * s.mad_x));
    }
  }
}

TEST_CASE("spike patterns: anti-symmetry around mid-gray") {
  // Palindromic windows make the gated upper-triangle differences symmetric
  // about zero, so m_delta = 0 and mirrored pixels straddle 128.
  std::mt19937_64 rng(23);
  std::size_t checked = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t w = 10;
    auto half = testutil::random_window(rng, w / 2);
    std::vector<double> x(half);
    x.insert(x.end(), half.rbegin(), half.rend());
    const auto [img, s] = encode_spike_patterns(Window(x), cfg_w(w));
    if (s.gated_count == 0) continue;
    CHECK(std::abs(s.median_delta) <= 1e-12);
    for (std::size_t i = 0; i < w; ++i) {
      for (std::size_t j = i + 1; j < w; ++j) {
        if (std::abs(x[j] - x[i]) <= s.threshold) continue;
        const double z = (x[j] - x[i] - s.median_delta) / s.mad_delta;
        if (std::abs(z) >= 3.0) continue;
        const int sum = img.at(i, j) + img.at(j, i);
        CHECK(sum >= 255);
        CHECK(sum <= 257);
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("spike patterns: mirrored pixels reflect about the shifted center") {
  // General windows: Z(j,i) = -Z(i,j) - 2 m_delta / MAD_delta, so the pair
  // reflects around 128 - 127 m_delta / (3 MAD_delta) within rounding.
  std::mt19937_64 rng(29);
  for (int t = 0; t < 300; ++t) {
    const auto x = testutil::random_window(rng, 10);
    const auto [img, s] = encode_spike_patterns(Window(x), cfg_w(10));
    if (s.gated_count == 0) continue;
    const double center = 128.0 - 127.0 * s.median_delta / (3.0 * s.mad_delta);
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = i + 1; j < 10; ++j) {
        const double d = x[j] - x[i];
        if (std::abs(d) <= s.threshold) continue;
        const double z1 = (d - s.median_delta) / s.mad_delta;
        const double z2 = (-d - s.median_delta) / s.mad_delta;
        if (std::abs(z1) >= 3.0 || std::abs(z2) >= 3.0) continue;
        const double mid = 0.5 * (img.at(i, j) + img.at(j, i));
        CHECK(std::abs(mid - center) <= 1.0);
      }
    }
  }
}

// ---------------------------------------------------------------------------

TEST_CASE("GAF: endpoint examples") {
  const GlobalBounds b{-1, 1};
  const auto top = encode_gaf_polar(Window(std::vector<double>(6, 1.0)), b, cfg_w(6));
  for (auto p : top.pixels.bytes()) CHECK(p == 255);
  const auto mid = encode_gaf_polar(Window(std::vector<double>(6, 0.0)), b, cfg_w(6));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) CHECK(mid.at(i, j) == (i == j ? 128 : 0));
  }
}

TEST_CASE("GAF: diagonal, symmetry and time reversal") {
  std::mt19937_64 rng(31);
  const GlobalBounds b{-2, 3};
  for (int t = 0; t < 1000; ++t) {
    const auto x = testutil::random_window(rng, 10, -2.5, 3.5);
    const auto img = encode_gaf_polar(Window(x), b, cfg_w(10));
    const auto sg = normalize_global(Window(x), b);
    auto rev = x;
    std::reverse(rev.begin(), rev.end());
    const auto rimg = encode_gaf_polar(Window(rev), b, cfg_w(10));
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(img.at(i, i) == static_cast<std::uint8_t>(round_half_up(255 * (sg[i] + 1) / 2)));
      CHECK(rimg.at(i, i) == img.at(9 - i, 9 - i));
      for (std::size_t j = 0; j < 10; ++j) CHECK(img.at(i, j) == img.at(j, i));
    }
  }
  CHECK(error_code_of([] { encode_gaf_polar(Window{1, 2, 3, 4}, {1, 1}, cfg_w(4)); }) ==
        ErrorCode::DegenerateBounds);
}

// ---------------------------------------------------------------------------

TEST_CASE("cymatic parameter mapping endpoints") {
  constexpr double pi = std::numbers::pi;
  CHECK(map_cymatic_params({0, 0, 0, 0, 0, 0}) == CymaticParams{2.5, 2.5, pi, pi, 0.5, 0.5});
  CHECK(map_cymatic_params({-1, -1, -1, -1, -1, -1}) == CymaticParams{1, 1, 0, 0, 0, 0});
  CHECK(map_cymatic_params({1, 1, 1, 1, 1, 1}) == CymaticParams{4, 4, 2 * pi, 2 * pi, 1, 1});
  // Out-of-range entries clip to the endpoints.
  CHECK(map_cymatic_params({-7, 9, -1e9, 1e9, 2, -2}) ==
        map_cymatic_params({-1, 1, -1, 1, 1, -1}));
  CHECK(error_code_of([] { map_cymatic_params({0, 0, std::nan(""), 0, 0, 0}); }) ==
        ErrorCode::NonFiniteInput);
}

TEST_CASE("cymatic: frozen 10x10 grid for the all-zeros descriptor") {
  const std::vector<std::uint8_t> expected{
      0, 0,   0,   0,   0,   0,   0,   0,   0,   0,    //
      0, 0,   212, 174, 91,  23,  12,  39,  0,   0,    //
      0, 216, 245, 199, 83,  0,   14,  64,  96,  0,    //
      0, 210, 254, 232, 100, 26,  95,  153, 167, 0,    //
      0, 153, 194, 219, 157, 145, 217, 244, 234, 0,    //
      0, 184, 182, 180, 188, 70,  176, 238, 246, 0,    //
      0, 234, 255, 245, 156, 25,  64,  157, 205, 0,    //
      0, 217, 232, 195, 95,  4,   17,  95,  160, 0,    //
      0, 0,   165, 130, 60,  9,   22,  84,  0,   0,    //
      0, 0,   0,   0,   0,   0,   0,   0,   0,   0};
  const auto img = encode_cymatic(map_cymatic_params({0, 0, 0, 0, 0, 0}), 10);
  CHECK(pixels_of(img) == expected);
}

TEST_CASE("cymatic: unit disk mask") {
  std::mt19937_64 rng(37);
  for (std::size_t w : {5u, 6u, 10u, 16u, 21u}) {
    for (int t = 0; t < 50; ++t) {
      DeviationDescriptor d;
      for (auto& v : d) v = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
      const auto img = encode_cymatic(map_cymatic_params(d), w);
      for (std::size_t r = 0; r < w; ++r) {
        for (std::size_t c = 0; c < w; ++c) {
          const double X = -1.0 + 2.0 * c / (w - 1.0);
          const double Y = -1.0 + 2.0 * r / (w - 1.0);
          if (X * X + Y * Y > 1.0) CHECK(img.at(r, c) == 0);
        }
      }
    }
  }
}

TEST_CASE("cymatic: m = 0 reduces to sin(R)cos(T)") {
  const auto img = encode_cymatic({1, 1, 0, 0, 0, 0}, 8);
  const auto ref = ref::cymatic_image_params(1, 1, 0, 0, 0, 0, 8);
  CHECK(pixels_of(img) == ref);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(7, 7) == 0);
}

TEST_CASE("cymatic: degenerate field is mid-gray inside the disk") {
  // k_r R + phi_r with blend 1 and alpha 0 gives C == 0 everywhere.
  const auto img = encode_cymatic({2, 2, 0, 0, 0.0, 1.0}, 10);
  for (std::size_t r = 0; r < 10; ++r) {
    for (std::size_t c = 0; c < 10; ++c) {
      const double X = -1.0 + 2.0 * c / 9.0, Y = -1.0 + 2.0 * r / 9.0;
      CHECK(img.at(r, c) == (X * X + Y * Y > 1.0 ? 0 : 128));
    }
  }
}

TEST_CASE("cymatic: descriptors mapping to identical params give identical fields") {
  const auto a = encode_cymatic(map_cymatic_params({3, 2, 1, -4, 0.25, 0.25}), 10);
  const auto b = encode_cymatic(map_cymatic_params({1, 1, 1, -1, 0.25, 0.25}), 10);
  CHECK(a == b);
}

TEST_CASE("cymatic: smoothness under small descriptor perturbation") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1, 1);
  int worst = 0;
  for (int t = 0; t < 100; ++t) {
    DeviationDescriptor d;
    for (auto& v : d) v = u(rng);
    const auto base = encode_cymatic(map_cymatic_params(d), 10);
    for (std::size_t k = 0; k < 6; ++k) {
      auto p = d;
      p[k] += 1e-3;
      const auto img = encode_cymatic(map_cymatic_params(p), 10);
      for (std::size_t i = 0; i < 100; ++i) {
        worst = std::max(worst, std::abs(int(img.pixels.bytes()[i]) -
                                         int(base.pixels.bytes()[i])));
      }
    }
  }
  CHECK(worst <= 8);
}

// ---------------------------------------------------------------------------

TEST_CASE("encoders match plain-loop references") {
  std::mt19937_64 rng(43);
  for (std::size_t w : {6u, 10u, 16u}) {
    const auto cfg = cfg_w(w);
    for (int t = 0; t < 100; ++t) {
      const auto x = testutil::random_window(rng, w, -3, 3);
      const Window win(x);
      CHECK(pixels_of(encode_slope_dynamics(win, cfg).first) == ref::slope_image(x));
      CHECK(pixels_of(encode_spike_patterns(win, cfg).first) == ref::spike_image(x, 3.0));
      CHECK(pixels_of(encode_gaf_polar(win, {-2.5, 2.5}, cfg)) == ref::gaf_image(x, -2.5, 2.5));
      double d[6];
      DeviationDescriptor dd;
      for (int k = 0; k < 3; ++k) {
        const auto y = testutil::random_window(rng, w, -3, 3);
        double dev[2];
        ref::deviation(y, -2.0, 2.0, dev);
        d[2 * k] = dev[0];
        d[2 * k + 1] = dev[1];
        const auto lr = compute_local_range(Window(y), cfg);
        const auto dv = compute_deviation(lr, {-2.0, 2.0});
        dd[2 * k] = dv.delta_min;
        dd[2 * k + 1] = dv.delta_max;
      }
      CHECK(pixels_of(encode_cymatic(map_cymatic_params(dd), w)) == ref::cymatic_image(d, int(w)));
    }
  }
}
