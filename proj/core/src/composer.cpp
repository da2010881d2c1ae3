#include "propimg/composer.hpp"

#include <string>

#include "propimg/error.hpp"

namespace propimg {
namespace {

void require_shape(const Image& img, std::size_t rows, std::size_t cols,
                   std::size_t channels, const char* what) {
  if (img.rows() != rows || img.cols() != cols || img.channels() != channels) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + " is " + std::to_string(img.rows()) + "x" +
                    std::to_string(img.cols()) + "x" +
                    std::to_string(img.channels()) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols) + "x" +
                    std::to_string(channels));
  }
}

ProprioImage stack_channels(const std::array<Image, 3>& tiles, PiScope scope,
                            std::string signal_kind) {
  const std::size_t rows = tiles[0].rows();
  const std::size_t cols = tiles[0].cols();
  if (rows == 0 || rows != cols) {
    throw Error(ErrorCode::ShapeMismatch, "tiles must be square and non-empty");
  }
  for (const Image& t : tiles) require_shape(t, rows, cols, 1, "tile");

  Image out(rows, cols, 3);
  auto dst = out.bytes();
  for (std::size_t c = 0; c < 3; ++c) {
    const auto src = tiles[c].bytes();
    for (std::size_t i = 0; i < rows * cols; ++i) dst[i * 3 + c] = src[i];
  }
  return {std::move(out), std::move(scope), std::move(signal_kind)};
}

}  // namespace

Image compose_temporal_tile(const SubImage& slope, const SubImage& spikes,
                            const SubImage& gaf, const SubImage& cymatic) {
  const std::size_t w = slope.pixels.rows();
  for (const SubImage* s : {&slope, &spikes, &gaf, &cymatic}) {
    require_shape(s->pixels, w, w, 1, "sub-image");
  }
  Image tile(2 * w, 2 * w, 1);
  tile.paste(slope.pixels, 0, 0);
  tile.paste(spikes.pixels, 0, w);
  tile.paste(gaf.pixels, w, 0);
  tile.paste(cymatic.pixels, w, w);
  return tile;
}

ProprioImage compose_leg_pi(const std::array<Image, 3>& per_joint_tiles,
                            Leg leg, std::string signal_kind) {
  return stack_channels(per_joint_tiles, LegScope{leg}, std::move(signal_kind));
}

ProprioImage compose_trunk_pi(const std::array<Image, 3>& per_axis_tiles,
                              std::string name) {
  std::string kind = name;
  return stack_channels(per_axis_tiles, TrunkScope{std::move(name)},
                        std::move(kind));
}

ProprioImage compose_body_pi(const LegPiMap& legs) {
  for (Leg leg : kLegs) {
    if (!legs.contains(leg)) {
      throw Error(ErrorCode::MissingLeg,
                  "leg " + std::string(to_string(leg)) + " absent");
    }
  }
  const Image& first = legs.at(Leg::LF).pixels;
  const std::size_t side = first.rows();
  if (side == 0) throw Error(ErrorCode::ShapeMismatch, "empty leg PI");
  for (Leg leg : kLegs) {
    require_shape(legs.at(leg).pixels, side, side, 3, "leg PI");
  }

  Image body(2 * side, 2 * side, 3);
  body.paste(legs.at(Leg::LF).pixels, 0, 0);
  body.paste(legs.at(Leg::RF).pixels, 0, side);
  body.paste(legs.at(Leg::LH).pixels, side, 0);
  body.paste(legs.at(Leg::RH).pixels, side, side);
  return {std::move(body), BodyScope{}, legs.at(Leg::LF).signal_kind};
}

LegPiMap split_body_pi(const ProprioImage& body) {
  const Image& img = body.pixels;
  if (img.channels() != 3 || img.rows() != img.cols() || img.rows() == 0 ||
      img.rows() % 2 != 0) {
    throw Error(ErrorCode::ShapeMismatch,
                "body PI must be 4w x 4w x 3, got " +
                    std::to_string(img.rows()) + "x" +
                    std::to_string(img.cols()) + "x" +
                    std::to_string(img.channels()));
  }
  const std::size_t side = img.rows() / 2;
  LegPiMap legs;
  for (Leg leg : kLegs) {
    const auto q = static_cast<std::size_t>(leg);
    legs[leg] = ProprioImage{img.crop((q / 2) * side, (q % 2) * side, side, side),
                             LegScope{leg}, body.signal_kind};
  }
  return legs;
}

TripletEncoding encode_triplet(const std::array<Window, 3>& windows,
                               const std::array<GlobalBounds, 3>& bounds,
                               const EncoderConfig& cfg) {
  const std::size_t w = cfg.window_w;
  for (const Window& win : windows) {
    if (win.size() != w) {
      throw Error(ErrorCode::ShapeMismatch,
                  "triplet window has " + std::to_string(win.size()) +
                      " samples, configured w is " + std::to_string(w));
    }
  }

  TripletEncoding enc;
  for (std::size_t c = 0; c < 3; ++c) {
    enc.local_ranges[c] = compute_local_range(windows[c], cfg);
    enc.deviations[c] = compute_deviation(enc.local_ranges[c], bounds[c]);
  }
  enc.descriptor = make_descriptor(enc.deviations);
  enc.cymatic = map_cymatic_params(enc.descriptor);
  const SubImage cymatic = encode_cymatic(enc.cymatic, w, cfg.epsilon);

  for (std::size_t c = 0; c < 3; ++c) {
    auto [slope, slope_f] = encode_slope_dynamics(windows[c], cfg);
    auto [spikes, spike_s] = encode_spike_patterns(windows[c], cfg);
    const SubImage gaf = encode_gaf_polar(windows[c], bounds[c], cfg);
    enc.slope[c] = slope_f;
    enc.spikes[c] = spike_s;
    enc.tiles[c] = compose_temporal_tile(slope, spikes, gaf, cymatic);
  }
  return enc;
}

}  // namespace propimg
