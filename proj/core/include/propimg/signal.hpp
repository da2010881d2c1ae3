#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace propimg {

// Datasheet limits of one signal channel.
struct GlobalBounds {
  double min = -1.0;
  double max = 1.0;

  // Throws DegenerateBounds unless min < max and both are finite.
  void validate() const;
  double midpoint() const noexcept { return 0.5 * (max + min); }
};

// Percentile span of the current window, widened by the configured margin.
struct LocalRange {
  double min = 0.0;
  double max = 0.0;
};

// Normalized shift of the local range relative to the global bounds.
// Unclipped; the cymatic mapper clips to [-1, 1].
struct Deviation {
  double delta_min = 0.0;
  double delta_max = 0.0;
};

// A length-w slice of one scalar channel, oldest sample first.
// Construction rejects NaN and Inf entries with NonFiniteInput.
class Window {
 public:
  Window() = default;
  explicit Window(std::vector<double> values);
  Window(std::initializer_list<double> values);
  static Window from(std::span<const double> values);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

struct EncoderConfig {
  std::size_t window_w = 10;
  double epsilon = 1e-8;
  double spike_alpha = 3.0;
  double percentile_lo = 0.10;
  double percentile_hi = 0.90;
  double range_margin = 0.05;

  // Throws InvalidConfig naming the first field out of range.
  void validate() const;
};

// Smallest window any encoder accepts.
inline constexpr std::size_t kMinWindow = 4;

// Global-bounds normalization to [-1, 1]; values past the bounds are clipped.
std::vector<double> normalize_global(const Window& window,
                                     const GlobalBounds& bounds);
double normalize_global(double value, const GlobalBounds& bounds);

// Linear interpolation between order statistics at fraction q in [0, 1]
// (rank q*(n-1)). `sorted` must be ascending and non-empty.
double percentile_sorted(std::span<const double> sorted, double q);

LocalRange compute_local_range(const Window& window, const EncoderConfig& cfg);

Deviation compute_deviation(const LocalRange& local,
                            const GlobalBounds& bounds);

// ---------------------------------------------------------------------------
// Morphology. Orders are fixed format constants.

enum class Leg : std::size_t { LF = 0, RF = 1, LH = 2, RH = 3 };
enum class Joint : std::size_t { HAA = 0, HFE = 1, KFE = 2 };
enum class Axis : std::size_t { X = 0, Y = 1, Z = 2 };

inline constexpr std::array<Leg, 4> kLegs{Leg::LF, Leg::RF, Leg::LH, Leg::RH};
inline constexpr std::array<Joint, 3> kJoints{Joint::HAA, Joint::HFE,
                                              Joint::KFE};
inline constexpr std::array<Axis, 3> kAxes{Axis::X, Axis::Y, Axis::Z};

std::string_view to_string(Leg leg) noexcept;
std::string_view to_string(Joint joint) noexcept;
std::string_view to_string(Axis axis) noexcept;

// Contact state bit for a leg: LF = bit 3, RF = 2, LH = 1, RH = 0.
constexpr unsigned contact_bit(Leg leg) noexcept {
  return 1u << (3u - static_cast<unsigned>(leg));
}

}  // namespace propimg
