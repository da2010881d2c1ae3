#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "propimg/synthgait.hpp"
#include "test_util.hpp"

using namespace propimg;
using testutil::error_code_of;

namespace {

const std::vector<double>& col(const GaitLog& log, const std::string& name) {
  return log.table.columns[log.table.column_index(name)];
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

GrfSweepResult sweep_log(const GaitLog& log, bool invert = false) {
  std::array<std::vector<double>, 4> grf;
  std::array<std::vector<bool>, 4> contact;
  for (std::size_t l = 0; l < 4; ++l) {
    grf[l] = col(log, log.grf_columns[l]);
    for (double v : col(log, log.label_columns[l])) contact[l].push_back((v > 0.5) != invert);
  }
  return sweep_grf_threshold(grf, contact, grf_candidate_grid(grf, 200));
}

}  // namespace

TEST_CASE("GaitSpec validation") {
  auto bad = [](auto mutate) {
    GaitSpec s;
    mutate(s);
    return error_code_of([&] { s.validate(); });
  };
  CHECK_NOTHROW(GaitSpec{}.validate());
  CHECK(bad([](GaitSpec& s) { s.duty_factor = 0; }) == ErrorCode::InvalidSpec);
  CHECK(bad([](GaitSpec& s) { s.duty_factor = 1; }) == ErrorCode::InvalidSpec);
  CHECK(bad([](GaitSpec& s) { s.sample_rate = 99; }) == ErrorCode::InvalidSpec);
  CHECK(bad([](GaitSpec& s) { s.period = 0; }) == ErrorCode::InvalidSpec);
  CHECK(bad([](GaitSpec& s) { s.duration = -1; }) == ErrorCode::InvalidSpec);
  CHECK(bad([](GaitSpec& s) { s.noise_sigma = -0.1; }) == ErrorCode::InvalidSpec);
}

TEST_CASE("row count and columns") {
  const auto log = generate_gait(GaitSpec{});
  CHECK(log.table.rows() == 5000);
  CHECK(log.channels.size() == 4 * 3 * 4 + 2 * 3);
  for (const char* name : {"t", "q_LF_HAA", "dq_RH_KFE", "p_LH_Z", "v_RF_X", "gyro_Y", "acc_Z",
                           "grf_LF", "contact_RH"}) {
    CHECK_NOTHROW(log.table.column_index(name));
  }
}

TEST_CASE("trot with duty 0.5 only has diagonal contact states") {
  GaitSpec spec;
  spec.noise_sigma = 0.0;
  const auto log = generate_gait(spec);
  std::size_t s1001 = 0, s0110 = 0;
  for (std::size_t r = 0; r < log.table.rows(); ++r) {
    std::array<bool, 4> c{};
    for (std::size_t l = 0; l < 4; ++l) c[l] = col(log, log.label_columns[l])[r] > 0.5;
    const auto state = encode_contact_state(c);
    CHECK((state == 0b1001 || state == 0b0110));
    s1001 += state == 0b1001;
    s0110 += state == 0b0110;
  }
  CHECK(s1001 > 0);
  CHECK(s0110 > 0);
}

TEST_CASE("labels follow the generative phase model") {
  for (GaitType g : {GaitType::Trot, GaitType::Crawl}) {
    GaitSpec spec;
    spec.gait = g;
    spec.duty_factor = 0.75;
    spec.friction = FrictionMode::Slippery;
    const auto log = generate_gait(spec);
    const auto& t = col(log, "t");
    for (std::size_t l = 0; l < 4; ++l) {
      const auto& c = col(log, log.label_columns[l]);
      for (std::size_t r = 0; r < t.size(); ++r) {
        CHECK((c[r] > 0.5) == in_stance(spec, kLegs[l], t[r]));
      }
    }
  }
  CHECK(phase_offsets(GaitType::Crawl) == std::array<double, 4>{0, 0.25, 0.5, 0.75});
}

TEST_CASE("noiseless GRF is zero in swing and positive in stance") {
  GaitSpec spec;
  spec.noise_sigma = 0.0;
  spec.gait = GaitType::Crawl;
  spec.duty_factor = 0.7;
  const auto log = generate_gait(spec);
  for (std::size_t l = 0; l < 4; ++l) {
    const auto& c = col(log, log.label_columns[l]);
    const auto& f = col(log, log.grf_columns[l]);
    for (std::size_t r = 0; r < c.size(); ++r) {
      if (c[r] > 0.5) {
        CHECK(f[r] > 0.0);
      } else {
        CHECK(f[r] == 0.0);
      }
    }
  }
}

TEST_CASE("signals stay finite and labels stay clean under noise") {
  GaitSpec spec;
  spec.noise_sigma = 0.05;
  spec.friction = FrictionMode::Slippery;
  const auto log = generate_gait(spec);
  for (const auto& column : log.table.columns) {
    for (double v : column) CHECK(std::isfinite(v));
  }
  for (std::size_t l = 0; l < 4; ++l) {
    for (double v : col(log, log.label_columns[l])) CHECK((v == 0.0 || v == 1.0));
  }
  CHECK(log.false_lift_samples > 0);
}

TEST_CASE("fixed seed reproduces bytes, different seeds differ") {
  const auto dir = testutil::scratch_dir("synth_seed");
  GaitSpec spec;
  spec.duration = 2.0;
  write_gait_dataset(spec, generate_gait(spec), dir / "a");
  write_gait_dataset(spec, generate_gait(spec), dir / "b");
  CHECK(slurp(dir / "a" / "synth.csv") == slurp(dir / "b" / "synth.csv"));
  CHECK(slurp(dir / "a" / "synth.json") == slurp(dir / "b" / "synth.json"));
  spec.seed = 2;
  write_gait_dataset(spec, generate_gait(spec), dir / "c");
  CHECK(slurp(dir / "a" / "synth.csv") != slurp(dir / "c" / "synth.csv"));
}

TEST_CASE("written dataset parses back") {
  const auto dir = testutil::scratch_dir("synth_parse");
  GaitSpec spec;
  spec.duration = 1.0;
  spec.friction = FrictionMode::Slippery;
  const auto log = generate_gait(spec);
  const auto path = write_gait_dataset(spec, log, dir);
  const Manifest m = parse_manifest(path);
  CHECK(m.groups.size() == 6);
  CHECK(m.grf_columns.has_value());
  const auto meta = nlohmann::json::parse(m.metadata_json);
  CHECK(meta["friction_mode"] == "slippery");
  CHECK(meta["gait"] == "trot");
  const auto table = read_csv(m.csv_path);
  CHECK(table.rows() == 500);
  const auto& a = log.table.columns[log.table.column_index("q_LF_HFE")];
  const auto& b = table.columns[table.column_index("q_LF_HFE")];
  CHECK(a == b);  // shortest round-trip formatting
}

TEST_CASE("GRF threshold sweep") {
  GaitSpec clean;
  clean.noise_sigma = 0.0;
  const auto noiseless = sweep_log(generate_gait(clean));
  for (double a : noiseless.leg_accuracy) CHECK(a == 1.0);
  CHECK(noiseless.state_accuracy == 1.0);

  CHECK(sweep_log(generate_gait(clean), true).mean_accuracy <= 0.5);

  for (GaitType g : {GaitType::Trot, GaitType::Crawl}) {
    GaitSpec stable;
    stable.gait = g;
    GaitSpec slippery = stable;
    slippery.friction = FrictionMode::Slippery;
    CHECK(sweep_log(generate_gait(slippery)).mean_accuracy <
          sweep_log(generate_gait(stable)).mean_accuracy);
  }

  std::array<std::vector<double>, 4> empty_grf;
  std::array<std::vector<bool>, 4> empty_contact;
  const std::vector<double> cand{1.0};
  CHECK(error_code_of([&] { sweep_grf_threshold(empty_grf, empty_contact, cand); }) ==
        ErrorCode::EmptyInput);
}

TEST_CASE("first best threshold wins") {
  std::array<std::vector<double>, 4> grf;
  std::array<std::vector<bool>, 4> contact;
  for (std::size_t l = 0; l < 4; ++l) {
    grf[l] = {0.0, 0.0, 10.0, 10.0};
    contact[l] = {false, false, true, true};
  }
  const std::vector<double> cand{-1.0, 2.0, 5.0, 9.0, 11.0};
  const auto r = sweep_grf_threshold(grf, contact, cand);
  CHECK(r.threshold == 2.0);
  CHECK(r.mean_accuracy == 1.0);
}
