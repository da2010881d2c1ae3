#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

#include "propimg/image.hpp"
#include "propimg/signal.hpp"

namespace propimg {

// Tie-break used by every quantizer: x.5 goes up.
inline double round_half_up(double v) { return std::floor(v + 0.5); }

enum class QuantizeMode {
  // (v - min) / (max - min) * 255; an all-zero image if the span is < eps.
  MinMax,
  // 255 * (v + 1) / 2 with v clipped to [-1, 1] first.
  AffinePm1,
};

// `field` is a square row-major grid of side `size`.
SubImage quantize_to_u8(std::span<const double> field, std::size_t size,
                        QuantizeMode mode, SubImageKind kind,
                        double epsilon = 1e-8);

// ---------------------------------------------------------------------------
// Slope dynamics: trend, jerk and peak density rendered as a rippled
// Gaussian blob. Horizontal blob position tracks the slope, vertical
// position tracks jerk, ripple count tracks peak density.

struct SlopeFeatures {
  double slope = 0.0;         // least-squares beta, signal units per sample
  double slope_hat = 0.0;     // [-1, 1]
  double jerk = 0.0;          // mean |second difference|
  double jerk_hat = 0.0;      // [0, 1]
  std::size_t peak_count = 0; // strict interior maxima
  double peak_density = 0.0;  // [0, 1]
  int ripple_freq = 2;        // {2..8}
  std::size_t center_x = 0;   // column of the blob center
  std::size_t center_y = 0;   // row of the blob center
  double sigma_g = 0.0;       // w / 6.25
};

SlopeFeatures slope_features(const Window& window, const EncoderConfig& cfg);
std::pair<SubImage, SlopeFeatures> encode_slope_dynamics(
    const Window& window, const EncoderConfig& cfg);

// ---------------------------------------------------------------------------
// Spike patterns: MAD-gated pairwise differences scored with robust Z.

struct SpikeStats {
  double median_x = 0.0;
  double mad_x = 0.0;        // includes +eps
  double threshold = 0.0;    // spike_alpha * mad_x
  double median_delta = 0.0; // over gated strict-upper-triangle entries
  double mad_delta = 0.0;    // floored at eps
  std::size_t gated_count = 0;  // both triangles
};

std::pair<SubImage, SpikeStats> encode_spike_patterns(const Window& window,
                                                      const EncoderConfig& cfg);

// ---------------------------------------------------------------------------
// Summation GAF over the globally normalized window, with the diagonal
// replaced by the normalized samples themselves.

SubImage encode_gaf_polar(const Window& window, const GlobalBounds& bounds,
                          const EncoderConfig& cfg);

// ---------------------------------------------------------------------------
// Cymatic (global-aware local shift) field.

struct CymaticParams {
  double k_r = 1.0;
  double k_t = 1.0;
  double phi_r = 0.0;
  double phi_t = 0.0;
  double alpha_mod = 0.0;
  double blend = 0.0;

  friend bool operator==(const CymaticParams&, const CymaticParams&) = default;
};

// Ordered [d_min^1, d_max^1, d_min^2, d_max^2, d_min^3, d_max^3].
using DeviationDescriptor = std::array<double, 6>;

DeviationDescriptor make_descriptor(const std::array<Deviation, 3>& devs);

CymaticParams map_cymatic_params(const DeviationDescriptor& descriptor);

SubImage encode_cymatic(const CymaticParams& params, std::size_t size_w,
                        double epsilon = 1e-8);

}  // namespace propimg
