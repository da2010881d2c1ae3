#pragma once

// Plain-loop reimplementations of the four encoders, written from the
// formulas without touching the library's helpers. Used only as oracles.

#include <cstdint>
#include <vector>

namespace ref {

struct Slope {
  double beta_hat;
  double jerk_hat;
  int peaks;
  int freq;
  int cx;
  int cy;
};

Slope slope_features(const std::vector<double>& x, double eps = 1e-8);
std::vector<std::uint8_t> slope_image(const std::vector<double>& x, double eps = 1e-8);

std::vector<std::uint8_t> spike_image(const std::vector<double>& x, double alpha,
                                      double eps = 1e-8);

std::vector<std::uint8_t> gaf_image(const std::vector<double>& x, double lo, double hi);

// descriptor -> params -> image, all in one pass.
std::vector<std::uint8_t> cymatic_image(const double descriptor[6], int w, double eps = 1e-8);
std::vector<std::uint8_t> cymatic_image_params(double kr, double kt, double pr, double pt,
                                               double am, double m, int w, double eps = 1e-8);

// Local range + deviation for one channel.
void deviation(const std::vector<double>& x, double lo, double hi, double out[2]);

}  // namespace ref
