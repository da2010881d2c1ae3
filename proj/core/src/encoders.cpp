#include "propimg/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "propimg/error.hpp"

namespace propimg {
namespace {

void require_length(const Window& window) {
  if (window.size() < kMinWindow) {
    throw Error(ErrorCode::WindowTooShort,
                "window of " + std::to_string(window.size()) +
                    " samples, need at least 4");
  }
}

// Median of a scratch buffer; reorders it.
double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double population_std(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(round_half_up(v), 0.0, 255.0));
}

std::uint8_t affine_pm1(double v) {
  return to_u8(255.0 * (std::clamp(v, -1.0, 1.0) + 1.0) / 2.0);
}

SubImage blank(SubImageKind kind, std::size_t w, std::uint8_t fill) {
  return SubImage{kind, Image(w, w, 1, fill)};
}

}  // namespace

SubImage quantize_to_u8(std::span<const double> field, std::size_t size,
                        QuantizeMode mode, SubImageKind kind, double epsilon) {
  if (field.size() != size * size) {
    throw Error(ErrorCode::ShapeMismatch, "field is not size x size");
  }
  for (double v : field) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteInput, "field value is not finite");
    }
  }
  SubImage out = blank(kind, size, 0);
  auto px = out.pixels.bytes();
  if (mode == QuantizeMode::AffinePm1) {
    std::transform(field.begin(), field.end(), px.begin(), affine_pm1);
    return out;
  }
  const auto [lo_it, hi_it] = std::minmax_element(field.begin(), field.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  if (span < epsilon) return out;
  std::transform(field.begin(), field.end(), px.begin(),
                 [&](double v) { return to_u8((v - lo) / span * 255.0); });
  return out;
}

// ---------------------------------------------------------------------------

SlopeFeatures slope_features(const Window& window, const EncoderConfig& cfg) {
  require_length(window);
  const auto x = window.values();
  const std::size_t w = x.size();
  const double n = static_cast<double>(w);
  const double eps = cfg.epsilon;

  SlopeFeatures f;

  const double i_mean = (n - 1.0) / 2.0;
  double x_mean = 0.0;
  for (double v : x) x_mean += v;
  x_mean /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    const double di = static_cast<double>(i) - i_mean;
    sxy += di * (x[i] - x_mean);
    sxx += di * di;
  }
  f.slope = sxy / sxx;
  f.slope_hat = std::clamp(f.slope / (population_std(x) + eps), -1.0, 1.0);

  std::vector<double> dx(w - 1);
  for (std::size_t i = 0; i + 1 < w; ++i) dx[i] = x[i + 1] - x[i];
  double jerk_sum = 0.0;
  for (std::size_t i = 0; i + 1 < dx.size(); ++i) {
    jerk_sum += std::abs(dx[i + 1] - dx[i]);
  }
  f.jerk = jerk_sum / (n - 2.0);
  f.jerk_hat = std::clamp(f.jerk / (population_std(dx) + eps), 0.0, 1.0);

  for (std::size_t i = 1; i + 1 < w; ++i) {
    if (x[i - 1] < x[i] && x[i] > x[i + 1]) ++f.peak_count;
  }
  f.peak_density =
      std::clamp(5.0 * static_cast<double>(f.peak_count) / n, 0.0, 1.0);
  f.ripple_freq = 2 + static_cast<int>(std::floor(6.0 * f.peak_density));

  f.center_x = static_cast<std::size_t>(
      std::floor((f.slope_hat + 1.0) / 2.0 * (n - 1.0)));
  f.center_y =
      static_cast<std::size_t>(std::floor((1.0 - f.jerk_hat) * (n - 1.0)));
  f.sigma_g = n / 6.25;
  return f;
}

std::pair<SubImage, SlopeFeatures> encode_slope_dynamics(
    const Window& window, const EncoderConfig& cfg) {
  const SlopeFeatures f = slope_features(window, cfg);
  const std::size_t w = window.size();
  const double two_sigma_sq = 2.0 * f.sigma_g * f.sigma_g;
  const double cx = static_cast<double>(f.center_x);
  const double cy = static_cast<double>(f.center_y);

  std::vector<double> field(w * w);
  for (std::size_t row = 0; row < w; ++row) {
    const double dy = static_cast<double>(row) - cy;
    for (std::size_t col = 0; col < w; ++col) {
      const double dxc = static_cast<double>(col) - cx;
      const double r = std::sqrt(dxc * dxc + dy * dy);
      const double gauss = std::exp(-(r * r) / two_sigma_sq);
      const double ripple =
          0.5 + 0.5 * std::cos(static_cast<double>(f.ripple_freq) * r /
                               f.sigma_g);
      field[row * w + col] = gauss * ripple;
    }
  }
  return {quantize_to_u8(field, w, QuantizeMode::MinMax,
                         SubImageKind::SlopeDynamics, cfg.epsilon),
          f};
}

// ---------------------------------------------------------------------------

std::pair<SubImage, SpikeStats> encode_spike_patterns(
    const Window& window, const EncoderConfig& cfg) {
  require_length(window);
  const auto x = window.values();
  const std::size_t w = x.size();
  const double eps = cfg.epsilon;

  SpikeStats s;
  std::vector<double> scratch(x.begin(), x.end());
  s.median_x = median_inplace(scratch);
  for (std::size_t i = 0; i < w; ++i) scratch[i] = std::abs(x[i] - s.median_x);
  s.mad_x = median_inplace(scratch) + eps;
  s.threshold = cfg.spike_alpha * s.mad_x;

  // Gate is symmetric (|x_j - x_i| = |x_i - x_j|), so the upper triangle
  // decides it for both halves.
  std::vector<double> upper;
  upper.reserve(w * (w - 1) / 2);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = i + 1; j < w; ++j) {
      const double d = x[j] - x[i];
      if (std::abs(d) > s.threshold) upper.push_back(d);
    }
  }
  s.gated_count = 2 * upper.size();

  SubImage img = blank(SubImageKind::SpikePatterns, w, 128);
  if (upper.empty()) return {std::move(img), s};

  scratch = upper;
  s.median_delta = median_inplace(scratch);
  for (std::size_t k = 0; k < upper.size(); ++k) {
    scratch[k] = std::abs(upper[k] - s.median_delta);
  }
  s.mad_delta = std::max(median_inplace(scratch), eps);

  auto score = [&](double d) {
    const double z = std::clamp((d - s.median_delta) / s.mad_delta, -3.0, 3.0);
    return to_u8(128.0 + 127.0 * z / 3.0);
  };
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = i + 1; j < w; ++j) {
      const double d = x[j] - x[i];
      if (std::abs(d) > s.threshold) {
        img.pixels.at(i, j) = score(d);
        img.pixels.at(j, i) = score(x[i] - x[j]);
      }
    }
  }
  return {std::move(img), s};
}

// ---------------------------------------------------------------------------

SubImage encode_gaf_polar(const Window& window, const GlobalBounds& bounds,
                          const EncoderConfig& /*cfg*/) {
  require_length(window);
  const std::vector<double> sg = normalize_global(window, bounds);
  const std::size_t w = sg.size();
  std::vector<double> phi(w);
  std::transform(sg.begin(), sg.end(), phi.begin(),
                 [](double v) { return std::acos(v); });

  SubImage img = blank(SubImageKind::GafPolar, w, 0);
  for (std::size_t i = 0; i < w; ++i) {
    img.pixels.at(i, i) = affine_pm1(sg[i]);
    for (std::size_t j = i + 1; j < w; ++j) {
      const std::uint8_t v = affine_pm1(std::cos(phi[i] + phi[j]));
      img.pixels.at(i, j) = v;
      img.pixels.at(j, i) = v;
    }
  }
  return img;
}

// ---------------------------------------------------------------------------

DeviationDescriptor make_descriptor(const std::array<Deviation, 3>& devs) {
  return {devs[0].delta_min, devs[0].delta_max, devs[1].delta_min,
          devs[1].delta_max, devs[2].delta_min, devs[2].delta_max};
}

CymaticParams map_cymatic_params(const DeviationDescriptor& descriptor) {
  std::array<double, 6> u{};
  for (std::size_t k = 0; k < 6; ++k) {
    if (!std::isfinite(descriptor[k])) {
      throw Error(ErrorCode::NonFiniteInput,
                  "descriptor entry " + std::to_string(k) + " is not finite");
    }
    u[k] = (std::clamp(descriptor[k], -1.0, 1.0) + 1.0) / 2.0;
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {1.0 + 3.0 * u[0], 1.0 + 3.0 * u[1], two_pi * u[2],
          two_pi * u[3],    u[4],             u[5]};
}

SubImage encode_cymatic(const CymaticParams& p, std::size_t size_w,
                        double epsilon) {
  if (size_w < kMinWindow) {
    throw Error(ErrorCode::WindowTooShort, "cymatic grid needs size >= 4");
  }
  const std::size_t w = size_w;
  std::vector<double> grid(w);
  for (std::size_t k = 0; k < w; ++k) {
    grid[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(w - 1);
  }

  std::vector<double> field(w * w, 0.0);
  std::vector<bool> inside(w * w, false);
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t row = 0; row < w; ++row) {
    const double y = grid[row];
    for (std::size_t col = 0; col < w; ++col) {
      const double x = grid[col];
      const double rr = x * x + y * y;
      if (rr > 1.0) continue;
      const double r = std::min(std::sqrt(rr), 1.0);
      const double t = std::atan2(y, x);
      const double c1 = std::sin(p.k_r * r + p.phi_r) * std::cos(p.k_t * t + p.phi_t);
      const double c2 = std::sin(p.k_r * r - p.k_t * t);
      const double c = (1.0 - p.blend) * c1 + p.blend * p.alpha_mod * c2;
      const std::size_t idx = row * w + col;
      field[idx] = c;
      inside[idx] = true;
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }

  SubImage img = blank(SubImageKind::Cymatic, w, 0);
  auto px = img.pixels.bytes();
  const double span = hi - lo;
  for (std::size_t idx = 0; idx < w * w; ++idx) {
    if (!inside[idx]) continue;
    px[idx] = span < epsilon ? std::uint8_t{128}
                             : to_u8((field[idx] - lo) / span * 255.0);
  }
  return img;
}

}  // namespace propimg
