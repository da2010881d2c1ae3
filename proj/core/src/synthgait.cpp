#include "propimg/synthgait.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "json.hpp"
#include "propimg/error.hpp"

namespace propimg {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kGravity = 9.81;
constexpr double kMass = 60.0;
constexpr double kStride = 0.16;     // m, foot travel per stance
constexpr double kHeight = 0.45;     // m, nominal hip height
constexpr double kClearance = 0.08;  // m, swing apex
constexpr double kThigh = 0.3;
constexpr double kShank = 0.3;
constexpr double kHipWidth = 0.1;
constexpr double kGrfFloor = 0.2;    // stance GRF never drops below this share

// Mean of kGrfFloor + (1 - kGrfFloor) sin(pi s) over a stance.
constexpr double kGrfShapeMean = kGrfFloor + (1.0 - kGrfFloor) * 2.0 / kPi;

double side_of(Leg leg) { return (leg == Leg::LF || leg == Leg::LH) ? 1.0 : -1.0; }
double front_of(Leg leg) { return (leg == Leg::LF || leg == Leg::RF) ? 1.0 : -1.0; }

struct LegPhase {
  bool stance;
  double s;  // progress through the current stance or swing, [0, 1)
  double p;  // gait phase, [0, 1)
};

LegPhase leg_phase(const GaitSpec& spec, Leg leg, double t) {
  const double cyc = t / spec.period + phase_offsets(spec.gait)[static_cast<std::size_t>(leg)];
  const double p = cyc - std::floor(cyc);
  if (p < spec.duty_factor) return {true, p / spec.duty_factor, p};
  return {false, (p - spec.duty_factor) / (1.0 - spec.duty_factor), p};
}

struct FootPose {
  std::array<double, 3> foot;   // hip frame X, Y, Z
  std::array<double, 3> joints; // HAA, HFE, KFE
};

FootPose foot_pose(const GaitSpec& spec, Leg leg, double t) {
  const LegPhase ph = leg_phase(spec, leg, t);
  double fx = 0.0;
  double fz = -kHeight;
  if (ph.stance) {
    fx = kStride * (0.5 - ph.s);
  } else {
    fx = kStride * (-0.5 + 0.5 * (1.0 - std::cos(kPi * ph.s)));
    fz += kClearance * std::sin(kPi * ph.s);
  }
  const double sway = 0.03 * std::sin(2.0 * kPi * ph.p);
  const double fy = side_of(leg) * kHipWidth + sway;

  // Planar two-link inverse kinematics in the sagittal plane.
  const double d = std::sqrt(fx * fx + fz * fz);
  const double knee_inner =
      std::acos(std::clamp((kThigh * kThigh + kShank * kShank - d * d) / (2 * kThigh * kShank), -1.0, 1.0));
  const double hip_offset =
      std::acos(std::clamp((kThigh * kThigh + d * d - kShank * kShank) / (2 * kThigh * d), -1.0, 1.0));
  return {{fx, fy, fz},
          {std::atan2(sway, -fz), std::atan2(fx, -fz) + hip_offset, -(kPi - knee_inner)}};
}

double grf_profile(const GaitSpec& spec, Leg leg, double t) {
  const LegPhase ph = leg_phase(spec, leg, t);
  if (!ph.stance) return 0.0;
  const double share = kMass * kGravity / (4.0 * spec.duty_factor * kGrfShapeMean);
  return share * (kGrfFloor + (1.0 - kGrfFloor) * std::sin(kPi * ph.s));
}

template <typename F>
auto central_diff(F&& f, double t) {
  constexpr double h = 1e-5;
  const auto a = f(t + h);
  const auto b = f(t - h);
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = (a[i] - b[i]) / (2 * h);
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(GaitType g) noexcept {
  return g == GaitType::Trot ? "trot" : "crawl";
}

std::string_view to_string(FrictionMode f) noexcept {
  return f == FrictionMode::Stable ? "stable" : "slippery";
}

void GaitSpec::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidSpec, why); };
  if (!(duty_factor > 0.0 && duty_factor < 1.0)) fail("duty_factor must lie in (0, 1)");
  if (!(sample_rate >= 100.0)) fail("sample_rate must be >= 100 Hz");
  if (!(period > 0.0) || !std::isfinite(period)) fail("period must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) fail("duration must be > 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) fail("noise_sigma must be >= 0");
}

std::array<double, 4> phase_offsets(GaitType gait) {
  if (gait == GaitType::Trot) return {0.0, 0.5, 0.5, 0.0};  // LF+RH, RF+LH
  return {0.0, 0.25, 0.5, 0.75};
}

bool in_stance(const GaitSpec& spec, Leg leg, double t) {
  return leg_phase(spec, leg, t).stance;
}

GaitLog generate_gait(const GaitSpec& spec) {
  spec.validate();
  const auto rows = static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
  if (rows == 0) throw Error(ErrorCode::InvalidSpec, "duration yields no samples");

  GaitLog log;
  SignalTable& table = log.table;
  std::vector<double> sigmas;  // per column, 0 for time and labels
  auto add_column = [&](std::string name, double sigma) {
    table.header.push_back(std::move(name));
    table.columns.emplace_back(rows, 0.0);
    sigmas.push_back(sigma);
    return table.columns.size() - 1;
  };
  auto add_channel = [&](const std::string& column, const std::string& kind,
                         MorphologySlot slot, std::size_t component,
                         std::string label, GlobalBounds bounds) {
    log.channels.push_back({column, kind, slot, component, std::move(label), bounds});
    return add_column(column, spec.noise_sigma * (bounds.max - bounds.min));
  };

  const std::size_t t_col = add_column("t", 0.0);

  const std::array<GlobalBounds, 3> joint_pos_bounds{{{-0.3, 0.3}, {-0.5, 2.0}, {-2.7, -0.3}}};
  const std::array<GlobalBounds, 3> foot_pos_bounds{{{-0.3, 0.3}, {-0.2, 0.2}, {-0.6, -0.2}}};
  const GlobalBounds joint_vel_bounds{-10.0, 10.0};
  const GlobalBounds foot_vel_bounds{-3.0, 3.0};
  const GlobalBounds gyro_bounds{-2.0, 2.0};
  const std::array<GlobalBounds, 3> acc_bounds{{{-5.0, 5.0}, {-5.0, 5.0}, {-20.0, 40.0}}};
  const GlobalBounds grf_bounds{0.0, 1000.0};

  std::array<std::array<std::size_t, 3>, 4> q_col{}, dq_col{}, p_col{}, v_col{};
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    const std::string ln(to_string(leg));
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string jn(to_string(kJoints[c]));
      q_col[l][c] = add_channel("q_" + ln + "_" + jn, "joint_position", leg, c, jn, joint_pos_bounds[c]);
    }
  }
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    const std::string ln(to_string(leg));
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string jn(to_string(kJoints[c]));
      dq_col[l][c] = add_channel("dq_" + ln + "_" + jn, "joint_velocity", leg, c, jn, joint_vel_bounds);
    }
  }
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    const std::string ln(to_string(leg));
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string an(to_string(kAxes[c]));
      p_col[l][c] = add_channel("p_" + ln + "_" + an, "foot_position", leg, c, an, foot_pos_bounds[c]);
    }
  }
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    const std::string ln(to_string(leg));
    for (std::size_t c = 0; c < 3; ++c) {
      const std::string an(to_string(kAxes[c]));
      v_col[l][c] = add_channel("v_" + ln + "_" + an, "foot_velocity", leg, c, an, foot_vel_bounds);
    }
  }
  std::array<std::size_t, 3> gyro_col{}, acc_col{};
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string an(to_string(kAxes[c]));
    gyro_col[c] = add_channel("gyro_" + an, "trunk_angular_velocity", TrunkSlot{}, c, an, gyro_bounds);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string an(to_string(kAxes[c]));
    acc_col[c] = add_channel("acc_" + an, "trunk_linear_acceleration", TrunkSlot{}, c, an, acc_bounds[c]);
  }
  std::array<std::size_t, 4> grf_col{}, contact_col{};
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    log.grf_columns[l] = "grf_" + std::string(to_string(leg));
    grf_col[l] = add_column(log.grf_columns[l], spec.noise_sigma * (grf_bounds.max - grf_bounds.min));
  }
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    log.label_columns[l] = "contact_" + std::string(to_string(leg));
    contact_col[l] = add_column(log.label_columns[l], 0.0);
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const bool slippery = spec.friction == FrictionMode::Slippery;
  // ~5% of stance samples fall inside a 20-40 ms false-lift event.
  const double mean_event = 0.030 * spec.sample_rate;
  const double p_event = 0.05 / std::max(mean_event, 1.0);
  std::array<std::size_t, 4> event_left{};

  for (std::size_t k = 0; k < rows; ++k) {
    const double t = static_cast<double>(k) / spec.sample_rate;
    table.columns[t_col][k] = t;

    std::array<double, 4> grf{};
    for (Leg leg : kLegs) {
      const auto l = static_cast<std::size_t>(leg);
      const bool stance = in_stance(spec, leg, t);
      const FootPose pose = foot_pose(spec, leg, t);
      const auto dq = central_diff([&](double tt) { return foot_pose(spec, leg, tt).joints; }, t);
      auto v = central_diff([&](double tt) { return foot_pose(spec, leg, tt).foot; }, t);
      auto foot = pose.foot;
      grf[l] = grf_profile(spec, leg, t);

      if (slippery && stance) {
        v[0] += 0.1 * unit_normal(rng);  // stance slip
        if (event_left[l] == 0 && unit(rng) < p_event) {
          const double ms = 20.0 + 20.0 * unit(rng);
          event_left[l] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ms * 1e-3 * spec.sample_rate)));
        }
        if (event_left[l] > 0) {
          --event_left[l];
          ++log.false_lift_samples;
          grf[l] = 0.0;
          foot[2] += 0.01;
        }
      } else if (!stance) {
        event_left[l] = 0;
      }

      for (std::size_t c = 0; c < 3; ++c) {
        table.columns[q_col[l][c]][k] = pose.joints[c];
        table.columns[dq_col[l][c]][k] = dq[c];
        table.columns[p_col[l][c]][k] = foot[c];
        table.columns[v_col[l][c]][k] = v[c];
      }
      table.columns[grf_col[l]][k] = grf[l];
      table.columns[contact_col[l]][k] = stance ? 1.0 : 0.0;
    }

    const double weight = kMass * kGravity;
    double roll = 0.0, pitch = 0.0, total = 0.0;
    for (Leg leg : kLegs) {
      const double share = grf[static_cast<std::size_t>(leg)] / weight - 0.25;
      roll += side_of(leg) * share;
      pitch += front_of(leg) * share;
      total += grf[static_cast<std::size_t>(leg)];
    }
    const double w_c = 2.0 * kPi / spec.period;
    table.columns[gyro_col[0]][k] = 0.8 * roll;
    table.columns[gyro_col[1]][k] = 0.8 * pitch;
    table.columns[gyro_col[2]][k] = 0.1 * std::sin(w_c * t);
    table.columns[acc_col[0]][k] = 0.5 * std::sin(2.0 * w_c * t) + 1.5 * pitch;
    table.columns[acc_col[1]][k] = 1.5 * roll;
    table.columns[acc_col[2]][k] = total / kMass;
  }

  if (spec.noise_sigma > 0.0) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (sigmas[c] == 0.0) continue;
      for (double& v : table.columns[c]) v += sigmas[c] * unit_normal(rng);
    }
  }
  return log;
}

void write_csv(const SignalTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    out << (c ? "," : "") << table.header[c];
  }
  out << '\n';
  std::string line;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    line.clear();
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) line += ',';
      line += fmt_double(table.columns[c][r]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::filesystem::path write_gait_dataset(const GaitSpec& spec, const GaitLog& log,
                                         const std::filesystem::path& dir,
                                         const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create directory " + dir.string());
  const auto csv = dir / (stem + ".csv");
  const auto json_path = dir / (stem + ".json");
  write_csv(log.table, csv);

  Manifest m;
  m.csv_path = csv;
  m.time_column = "t";
  m.sample_rate = spec.sample_rate;
  m.channels = log.channels;
  m.label_columns = log.label_columns;
  m.grf_columns = log.grf_columns;
  nlohmann::json meta;
  meta["generator"] = "synthgait";
  meta["gait"] = to_string(spec.gait);
  meta["friction_mode"] = to_string(spec.friction);
  meta["duty_factor"] = spec.duty_factor;
  meta["period"] = spec.period;
  meta["duration"] = spec.duration;
  meta["noise_sigma"] = spec.noise_sigma;
  meta["seed"] = spec.seed;
  meta["rows"] = log.table.rows();
  m.metadata_json = meta.dump();
  resolve_groups(m);

  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot create " + json_path.string());
  out << manifest_to_json(m, dir);
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + json_path.string());
  return json_path;
}

// ---------------------------------------------------------------------------

GrfSweepResult sweep_grf_threshold(const std::array<std::vector<double>, 4>& grf,
                                   const std::array<std::vector<bool>, 4>& contact,
                                   std::span<const double> candidates) {
  const std::size_t n = grf[0].size();
  if (n == 0 || candidates.empty()) {
    throw Error(ErrorCode::EmptyInput, "GRF sweep needs rows and candidate thresholds");
  }
  for (std::size_t l = 0; l < 4; ++l) {
    if (grf[l].size() != n || contact[l].size() != n) {
      throw Error(ErrorCode::ShapeMismatch, "GRF and label columns differ in length");
    }
  }

  GrfSweepResult best;
  best.mean_accuracy = -1.0;
  for (double th : candidates) {
    std::array<std::size_t, 4> hits{};
    std::size_t state_hits = 0;
    for (std::size_t r = 0; r < n; ++r) {
      bool all = true;
      for (std::size_t l = 0; l < 4; ++l) {
        const bool ok = (grf[l][r] > th) == contact[l][r];
        hits[l] += ok ? 1 : 0;
        all = all && ok;
      }
      state_hits += all ? 1 : 0;
    }
    std::array<double, 4> acc{};
    double mean = 0.0;
    for (std::size_t l = 0; l < 4; ++l) {
      acc[l] = static_cast<double>(hits[l]) / static_cast<double>(n);
      mean += acc[l] / 4.0;
    }
    if (mean > best.mean_accuracy) {
      best = {th, acc, mean, static_cast<double>(state_hits) / static_cast<double>(n)};
    }
  }
  return best;
}

std::vector<double> grf_candidate_grid(const std::array<std::vector<double>, 4>& grf,
                                       std::size_t count) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& col : grf) {
    for (double v : col) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi) || count == 0) throw Error(ErrorCode::EmptyInput, "no GRF samples");
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = count == 1 ? lo
                         : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

void extract_grf_and_labels(const Manifest& manifest, const SignalTable& table,
                            std::array<std::vector<double>, 4>& grf,
                            std::array<std::vector<bool>, 4>& contact) {
  if (!manifest.grf_columns || !manifest.label_columns) {
    throw Error(ErrorCode::MalformedManifest, "manifest lacks grf or labels columns");
  }
  for (std::size_t l = 0; l < 4; ++l) {
    grf[l] = table.columns[table.column_index((*manifest.grf_columns)[l])];
    const auto& lab = table.columns[table.column_index((*manifest.label_columns)[l])];
    contact[l].resize(lab.size());
    for (std::size_t r = 0; r < lab.size(); ++r) contact[l][r] = lab[r] > 0.5;
  }
}

}  // namespace propimg
