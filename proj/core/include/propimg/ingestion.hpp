#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "propimg/signal.hpp"

namespace propimg {

struct TrunkSlot {
  friend bool operator==(const TrunkSlot&, const TrunkSlot&) = default;
};
using MorphologySlot = std::variant<Leg, TrunkSlot>;

// One CSV column bound to a signal kind, a morphology slot and a triplet
// component (0..2: HAA/HFE/KFE or X/Y/Z).
struct ChannelBinding {
  std::string column;
  std::string kind;
  MorphologySlot slot;
  std::size_t component = 0;
  std::string component_label;  // as written, e.g. "HFE" or "Z"
  GlobalBounds bounds;
};

// All channels of one signal kind, resolved to indices into
// Manifest::channels. Leg groups hold four triplets in LF, RF, LH, RH
// order; trunk groups hold one.
struct SignalGroup {
  std::string kind;
  bool is_leg = false;
  std::vector<std::array<std::size_t, 3>> triplets;
};

// JSON manifest describing one synchronized CSV log. Schema:
//
//   {
//     "csv": "log.csv",                  // relative to the manifest
//     "time_column": "t",                // optional, default "t"
//     "sample_rate": 500,
//     "window": 10, "stride": 1,         // optional, defaults 10 / 1
//     "channels": [
//       {"column": "q_LF_HAA", "kind": "joint_position",
//        "slot": "LF", "component": "HAA", "bounds": [-0.6, 0.6]},
//       {"column": "gyro_x", "kind": "trunk_angular_velocity",
//        "slot": "trunk", "component": "X", "bounds": [-4, 4]}
//     ],
//     "labels": {"LF": "c_LF", "RF": "c_RF", "LH": "c_LH", "RH": "c_RH"},
//     "grf":    {"LF": "f_LF", ...},     // optional, vertical GRF columns
//     "metadata": {...}                  // optional, passed through
//   }
struct Manifest {
  std::filesystem::path csv_path;
  std::string time_column = "t";
  double sample_rate = 0.0;
  std::size_t window_w = 10;
  std::size_t stride = 1;
  std::vector<ChannelBinding> channels;
  std::vector<SignalGroup> groups;  // order of first appearance
  std::optional<std::array<std::string, 4>> label_columns;
  std::optional<std::array<std::string, 4>> grf_columns;
  std::string metadata_json = "{}";

  const SignalGroup* find_group(const std::string& kind) const;
};

// Reads and validates a manifest, including that every referenced column
// exists in the CSV header. Errors: MalformedManifest, InvalidBounds,
// MissingColumn, IoFailure.
Manifest parse_manifest(const std::filesystem::path& path);

// Rebuilds `groups` from `channels` and checks completeness.
void resolve_groups(Manifest& manifest);

// Serializes with `csv` written relative to `manifest_dir`.
std::string manifest_to_json(const Manifest& manifest,
                             const std::filesystem::path& manifest_dir);

// Column-major CSV contents. Empty cells and "nan" parse as NaN.
struct SignalTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns[0].size(); }
  std::size_t column_index(const std::string& name) const;  // MissingColumn
};

SignalTable read_csv(const std::filesystem::path& path);
std::vector<std::string> read_csv_header(const std::filesystem::path& path);

struct GroupWindows {
  std::vector<std::array<Window, 3>> triplets;
};

struct LabeledWindowSet {
  std::size_t timestep = 0;  // row index of the window's last sample
  double time = 0.0;
  std::vector<GroupWindows> groups;  // parallel to Manifest::groups
  std::optional<std::uint8_t> contact_state;  // bit 3 = LF ... bit 0 = RH
};

// Encodes four per-foot contact flags into the 16-state label.
std::uint8_t encode_contact_state(const std::array<bool, 4>& lf_rf_lh_rh);

// Sequential sliding-window reader. Windows end at rows w-1, w-1+stride, ...
// Windows touching a NaN in any bound column are skipped and counted.
class WindowStream {
 public:
  // Loads the CSV named by the manifest. Errors: NonMonotonicTime,
  // TooFewRows, IoFailure.
  explicit WindowStream(Manifest manifest);
  WindowStream(Manifest manifest, SignalTable table);

  std::optional<LabeledWindowSet> next();

  const Manifest& manifest() const { return manifest_; }
  const SignalTable& table() const { return table_; }
  std::size_t candidates() const { return candidates_; }
  std::size_t skipped() const { return skipped_; }
  std::size_t emitted() const { return emitted_; }

  // Window set ending at `end_row`, ignoring stride; std::nullopt if a NaN
  // falls inside it.
  std::optional<LabeledWindowSet> window_at(std::size_t end_row) const;

 private:
  void prepare();

  Manifest manifest_;
  SignalTable table_;
  std::vector<std::size_t> channel_cols_;
  std::vector<std::size_t> label_cols_;
  std::size_t time_col_ = 0;
  std::vector<std::size_t> bad_prefix_;  // count of NaN rows before row i
  std::size_t next_end_ = 0;
  std::size_t candidates_ = 0;
  std::size_t skipped_ = 0;
  std::size_t emitted_ = 0;
};

struct WindowSetBatch {
  std::vector<LabeledWindowSet> sets;
  std::size_t candidates = 0;
  std::size_t skipped = 0;
};

// Drains a WindowStream into memory.
WindowSetBatch stream_windows(const Manifest& manifest);

}  // namespace propimg
