#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "propimg/encoders.hpp"
#include "propimg/image.hpp"
#include "propimg/signal.hpp"

namespace propimg {

// Quadrant order inside a temporal tile, row-major:
//   [[SlopeDynamics, SpikePatterns],
//    [GafPolar,      Cymatic      ]]
inline constexpr std::array<SubImageKind, 4> kTileLayout{
    SubImageKind::SlopeDynamics, SubImageKind::SpikePatterns,
    SubImageKind::GafPolar, SubImageKind::Cymatic};

// Written into PIT headers and index files. 16 bytes exactly.
inline constexpr std::string_view kLayoutTag = "SLSPGFCY-LFRFLHR";

struct LegScope {
  Leg leg;
  friend bool operator==(const LegScope&, const LegScope&) = default;
};
struct BodyScope {
  friend bool operator==(const BodyScope&, const BodyScope&) = default;
};
struct TrunkScope {
  std::string name;
  friend bool operator==(const TrunkScope&, const TrunkScope&) = default;
};
using PiScope = std::variant<LegScope, BodyScope, TrunkScope>;

// Leg and trunk PIs are 2w x 2w x 3, body PIs 4w x 4w x 3.
struct ProprioImage {
  Image pixels;
  PiScope scope;
  std::string signal_kind;

  friend bool operator==(const ProprioImage&, const ProprioImage&) = default;
};

using LegPiMap = std::map<Leg, ProprioImage>;

// 2w x 2w single-channel tile in kTileLayout order.
Image compose_temporal_tile(const SubImage& slope, const SubImage& spikes,
                            const SubImage& gaf, const SubImage& cymatic);

// Per-joint tiles in HAA/HFE/KFE order (or X/Y/Z for foot signals).
ProprioImage compose_leg_pi(const std::array<Image, 3>& per_joint_tiles,
                            Leg leg, std::string signal_kind = {});

// [[LF, RF], [LH, RH]].
ProprioImage compose_body_pi(const LegPiMap& legs);
LegPiMap split_body_pi(const ProprioImage& body);

ProprioImage compose_trunk_pi(const std::array<Image, 3>& per_axis_tiles,
                              std::string name);

// Everything one triplet contributes to a tile, kept for inspection.
struct TripletEncoding {
  std::array<Image, 3> tiles;
  std::array<SlopeFeatures, 3> slope;
  std::array<SpikeStats, 3> spikes;
  std::array<LocalRange, 3> local_ranges;
  std::array<Deviation, 3> deviations;
  DeviationDescriptor descriptor{};
  CymaticParams cymatic;
};

// Slope/spike/GAF per channel; one cymatic sub-image from the triplet's
// six-entry deviation descriptor, replicated into all three tiles.
TripletEncoding encode_triplet(const std::array<Window, 3>& windows,
                               const std::array<GlobalBounds, 3>& bounds,
                               const EncoderConfig& cfg);

inline std::array<Image, 3> build_signal_group_pi(
    const std::array<Window, 3>& windows,
    const std::array<GlobalBounds, 3>& bounds, const EncoderConfig& cfg) {
  return encode_triplet(windows, bounds, cfg).tiles;
}

}  // namespace propimg
