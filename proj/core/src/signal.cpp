#include "propimg/signal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "propimg/error.hpp"

namespace propimg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DegenerateBounds: return "DegenerateBounds";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingLeg: return "MissingLeg";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  }
  return "Unknown";
}

void GlobalBounds::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(max > min)) {
    throw Error(ErrorCode::DegenerateBounds,
                "global bounds [" + std::to_string(min) + ", " +
                    std::to_string(max) + "] require min < max");
  }
}

Window::Window(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::NonFiniteInput,
                  "window entry " + std::to_string(i) + " is not finite");
    }
  }
}

Window::Window(std::initializer_list<double> values)
    : Window(std::vector<double>(values)) {}

Window Window::from(std::span<const double> values) {
  return Window(std::vector<double>(values.begin(), values.end()));
}

void EncoderConfig::validate() const {
  auto fail = [](const char* what) {
    throw Error(ErrorCode::InvalidConfig, what);
  };
  if (window_w < kMinWindow) fail("window_w must be >= 4");
  if (!(epsilon > 0.0)) fail("epsilon must be > 0");
  if (!(spike_alpha > 0.0)) fail("spike_alpha must be > 0");
  if (!(percentile_lo >= 0.0 && percentile_lo < percentile_hi &&
        percentile_hi <= 1.0)) {
    fail("percentiles must satisfy 0 <= lo < hi <= 1");
  }
  if (!(range_margin >= 0.0)) fail("range_margin must be >= 0");
}

namespace {

double normalize_unchecked(double value, const GlobalBounds& bounds) {
  const double v = ((value - bounds.max) + (value - bounds.min)) /
                   (bounds.max - bounds.min);
  return std::clamp(v, -1.0, 1.0);
}

}  // namespace

double normalize_global(double value, const GlobalBounds& bounds) {
  bounds.validate();
  if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteInput, "value is not finite");
  return normalize_unchecked(value, bounds);
}

std::vector<double> normalize_global(const Window& window,
                                     const GlobalBounds& bounds) {
  bounds.validate();
  std::vector<double> out(window.size());
  std::transform(window.values().begin(), window.values().end(), out.begin(),
                 [&](double v) { return normalize_unchecked(v, bounds); });
  return out;
}

double percentile_sorted(std::span<const double> sorted, double q) {
  const double rank = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

LocalRange compute_local_range(const Window& window, const EncoderConfig& cfg) {
  if (window.size() == 0) {
    throw Error(ErrorCode::WindowTooShort, "empty window");
  }
  std::vector<double> sorted(window.values().begin(), window.values().end());
  std::sort(sorted.begin(), sorted.end());
  const double p_lo = percentile_sorted(sorted, cfg.percentile_lo);
  const double p_hi = percentile_sorted(sorted, cfg.percentile_hi);
  const double pad = cfg.range_margin * (p_hi - p_lo);
  return {p_lo - pad, p_hi + pad};
}

Deviation compute_deviation(const LocalRange& local,
                            const GlobalBounds& bounds) {
  bounds.validate();
  const double mu = bounds.midpoint();
  return {(local.min - mu) / std::abs(mu - bounds.min),
          (local.max - mu) / std::abs(mu - bounds.max)};
}

std::string_view to_string(Leg leg) noexcept {
  constexpr std::string_view names[] = {"LF", "RF", "LH", "RH"};
  return names[static_cast<std::size_t>(leg)];
}

std::string_view to_string(Joint joint) noexcept {
  constexpr std::string_view names[] = {"HAA", "HFE", "KFE"};
  return names[static_cast<std::size_t>(joint)];
}

std::string_view to_string(Axis axis) noexcept {
  constexpr std::string_view names[] = {"X", "Y", "Z"};
  return names[static_cast<std::size_t>(axis)];
}

}  // namespace propimg
