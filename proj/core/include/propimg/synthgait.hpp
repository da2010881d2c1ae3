#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "propimg/ingestion.hpp"

namespace propimg {

enum class GaitType { Trot, Crawl };
enum class FrictionMode { Stable, Slippery };

std::string_view to_string(GaitType g) noexcept;
std::string_view to_string(FrictionMode f) noexcept;

struct GaitSpec {
  GaitType gait = GaitType::Trot;
  double duty_factor = 0.5;
  double period = 0.5;         // seconds per gait cycle
  double sample_rate = 500.0;  // Hz
  double duration = 10.0;      // seconds
  // Gaussian noise std as a fraction of each channel's global range.
  double noise_sigma = 0.01;
  FrictionMode friction = FrictionMode::Stable;
  std::uint64_t seed = 1;

  void validate() const;  // InvalidSpec
};

// Per-leg phase offsets (LF, RF, LH, RH) in fractions of a period.
std::array<double, 4> phase_offsets(GaitType gait);

// Generative stance bit for `leg` at time t.
bool in_stance(const GaitSpec& spec, Leg leg, double t);

// Generated log, column-major like SignalTable, plus the bindings needed to
// write a manifest for it.
struct GaitLog {
  SignalTable table;
  std::vector<ChannelBinding> channels;
  std::array<std::string, 4> label_columns;
  std::array<std::string, 4> grf_columns;
  std::size_t false_lift_samples = 0;  // slippery mode only
};

GaitLog generate_gait(const GaitSpec& spec);

// Writes `<dir>/<stem>.csv` and `<dir>/<stem>.json`; returns the manifest path.
std::filesystem::path write_gait_dataset(const GaitSpec& spec, const GaitLog& log,
                                         const std::filesystem::path& dir,
                                         const std::string& stem = "synth");

void write_csv(const SignalTable& table, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Classical contact baseline: contact := GRF_z > threshold.

struct GrfSweepResult {
  double threshold = 0.0;
  std::array<double, 4> leg_accuracy{};  // LF, RF, LH, RH at `threshold`
  double mean_accuracy = 0.0;
  double state_accuracy = 0.0;  // all four legs right
};

// grf[leg][row] and contact[leg][row]; rows must agree across legs.
// The first candidate reaching the best mean per-leg agreement wins.
// Errors: EmptyInput.
GrfSweepResult sweep_grf_threshold(const std::array<std::vector<double>, 4>& grf,
                                   const std::array<std::vector<bool>, 4>& contact,
                                   std::span<const double> candidates);

// `count` evenly spaced thresholds spanning [min, max] of all GRF samples.
std::vector<double> grf_candidate_grid(const std::array<std::vector<double>, 4>& grf,
                                       std::size_t count);

// Pulls GRF and label columns named by the manifest out of a table.
void extract_grf_and_labels(const Manifest& manifest, const SignalTable& table,
                            std::array<std::vector<double>, 4>& grf,
                            std::array<std::vector<bool>, 4>& contact);

}  // namespace propimg
