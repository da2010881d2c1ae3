#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "propimg/composer.hpp"
#include "propimg/ingestion.hpp"
#include "propimg/pit.hpp"

namespace propimg {

// Runs fn(i) for i in [0, n) on `threads` workers (inline when threads <= 1).
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

// Body PI for a leg group, trunk PI for a trunk group.
ProprioImage encode_group(const Manifest& manifest, const SignalGroup& group,
                          const GroupWindows& windows, const EncoderConfig& cfg);

ProprioImage encode_leg_group(const std::array<std::array<Window, 3>, 4>& legs,
                              const std::array<std::array<GlobalBounds, 3>, 4>& bounds,
                              const EncoderConfig& cfg, const std::string& kind = {});

std::string pit_file_name(const SignalGroup& group);

// 8-bit RGB PNG with the PI's exact pixel values.
void export_png(const ProprioImage& pi, const std::filesystem::path& path);

// ---------------------------------------------------------------------------

// Window length comes from cfg.window_w (overriding the manifest's);
// stride from the manifest.
struct EncodeOptions {
  EncoderConfig cfg;
  std::vector<std::string> signals;  // empty = every group in the manifest
  unsigned threads = 1;
  std::string split = "all";
  std::size_t batch_size = 512;
};

struct OutputFile {
  std::filesystem::path path;  // relative to the output directory
  std::string signal_kind;
  std::string scope;  // "body" or "trunk"
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint64_t records = 0;
};

struct RunReport {
  std::size_t candidates = 0;
  std::size_t processed = 0;
  std::size_t skipped = 0;
  double wall_seconds = 0.0;
  double read_seconds = 0.0;
  double encode_seconds = 0.0;
  double write_seconds = 0.0;
  double images_per_second = 0.0;  // composed PIs written per wall second
  unsigned threads = 1;
  std::vector<OutputFile> outputs;

  std::string to_json() const;
};

// Streams the manifest's windows, encodes every selected group and writes
// one PIT per group plus `index.json`. Records are written in window order
// for any thread count.
RunReport encode_dataset(const Manifest& manifest, const std::filesystem::path& out_dir,
                         const EncodeOptions& options);

// ---------------------------------------------------------------------------

struct InspectResult {
  std::size_t window_index = 0;
  std::size_t end_row = 0;
  std::string channel;
  std::string signal_kind;
  std::size_t component = 0;
  std::vector<double> values;
  std::vector<double> normalized;
  GlobalBounds bounds;
  SlopeFeatures slope;
  SpikeStats spikes;
  LocalRange local_range;
  Deviation deviation;
  DeviationDescriptor descriptor{};
  CymaticParams cymatic;

  std::string to_json() const;
};

// Intermediate quantities for `channel` in the window_index-th candidate
// window (end row w-1 + index*stride). Errors: MissingColumn,
// IndexOutOfRange, NonFiniteInput (window contains NaN).
InspectResult inspect_window(const Manifest& manifest, std::size_t window_index,
                             const std::string& channel, const EncoderConfig& cfg);

// ---------------------------------------------------------------------------

inline constexpr double kReferenceLatencyMs = 1.5;
inline constexpr double kTargetLatencyMs = 0.15;

struct LatencyStats {
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
  double images_per_second = 0.0;
};

struct BenchOptions {
  std::size_t window = 10;
  std::size_t iters = 2000;  // body PIs per run
  unsigned threads = 1;
  std::uint64_t seed = 7;
};

struct BenchReport {
  BenchOptions options;
  LatencyStats single;   // per leg PI, one thread
  double multi_images_per_second = 0.0;  // leg PIs/s across `threads`
  unsigned hardware_threads = 0;
  double wall_seconds = 0.0;

  bool within_reference() const { return single.mean_ms <= kReferenceLatencyMs; }
  bool within_target() const { return single.mean_ms <= kTargetLatencyMs; }
  std::string to_json() const;
};

// Encodes random windows end to end (triplet -> leg tile x4 -> body PI).
BenchReport run_benchmark(const BenchOptions& options);

}  // namespace propimg
