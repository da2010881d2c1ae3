// propimg: proprioceptive image toolkit.
//
//   propimg synth   --gait trot --duration 60 --out data/
//   propimg encode  data/synth.json --out pis/ --window 10 --threads 4
//   propimg png     pis/joint_position_body.pit --index 0 --out pi.png
//   propimg inspect data/synth.json --window-index 0 --channel q_LF_HFE
//   propimg bench   --window 10 --iters 2000 --threads 2
//   propimg grf-sweep data/synth.json
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "propimg/error.hpp"
#include "propimg/pipeline.hpp"
#include "propimg/synthgait.hpp"

namespace {

using propimg::Error;
using propimg::ErrorCode;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoFailure: return kExitIo;
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidSpec: return kExitUsage;
    default: return kExitData;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

unsigned threads_from_env(unsigned flag_value, bool flag_given) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("PI_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return flag_value;
}

struct EncoderFlags {
  std::size_t window = 10;
  double spike_alpha = 3.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--window", window, "Sliding window length w")->check(CLI::Range(4, 4096));
    cmd->add_option("--spike-alpha", spike_alpha, "Spike gate sensitivity")
        ->check(CLI::PositiveNumber);
  }
  propimg::EncoderConfig config() const {
    propimg::EncoderConfig cfg;
    cfg.window_w = window;
    cfg.spike_alpha = spike_alpha;
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proprioceptive image encoder for quadruped time series"};
  app.require_subcommand(1);
  std::string stage = "startup";

  // encode
  auto* encode = app.add_subcommand("encode", "Encode a manifest's windows into PIT files");
  std::string encode_manifest, encode_out, encode_signals, encode_split = "all";
  std::size_t encode_stride = 0;
  unsigned encode_threads = 1;
  EncoderFlags encode_flags;
  encode->add_option("manifest", encode_manifest, "Dataset manifest (JSON)")->required();
  encode->add_option("--out", encode_out, "Output directory")->required();
  encode->add_option("--stride", encode_stride, "Window stride (default: manifest value)");
  encode->add_option("--signals", encode_signals, "Comma-separated signal kinds (default: all)");
  auto* threads_opt = encode->add_option("--threads", encode_threads, "Worker threads (env PI_THREADS)");
  encode->add_option("--split", encode_split, "Split name recorded in index.json");
  encode_flags.add_to(encode);

  // png
  auto* png = app.add_subcommand("png", "Write one PIT record as a PNG");
  std::string png_pit, png_out;
  std::uint64_t png_index = 0;
  png->add_option("pit", png_pit, "PIT file")->required();
  png->add_option("--index", png_index, "Record index");
  png->add_option("--out", png_out, "Output PNG path")->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Dump intermediate encoder features as JSON");
  std::string inspect_manifest, inspect_channel;
  std::size_t inspect_index = 0;
  EncoderFlags inspect_flags;
  inspect->add_option("manifest", inspect_manifest, "Dataset manifest (JSON)")->required();
  inspect->add_option("--window-index", inspect_index, "Window index in stride order");
  inspect->add_option("--channel", inspect_channel, "CSV column of the channel")->required();
  inspect_flags.add_to(inspect);

  // bench
  auto* bench = app.add_subcommand("bench", "Measure end-to-end encoder latency");
  propimg::BenchOptions bench_opts;
  bench->add_option("--window", bench_opts.window, "Window length")->check(CLI::Range(4, 4096));
  bench->add_option("--iters", bench_opts.iters, "Body PIs per measurement");
  auto* bench_threads_opt = bench->add_option("--threads", bench_opts.threads, "Threads for the multi-thread run");
  bench->add_option("--seed", bench_opts.seed, "Input RNG seed");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic gait log and manifest");
  propimg::GaitSpec spec;
  std::string synth_out, synth_gait = "trot", synth_friction = "stable", synth_stem = "synth";
  bool synth_slippery = false;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--gait", synth_gait, "trot or crawl")->check(CLI::IsMember({"trot", "crawl"}));
  synth->add_option("--friction", synth_friction, "stable or slippery")
      ->check(CLI::IsMember({"stable", "slippery"}));
  synth->add_flag("--slippery", synth_slippery, "Shorthand for --friction slippery");
  synth->add_option("--duty", spec.duty_factor, "Duty factor in (0, 1)");
  synth->add_option("--period", spec.period, "Gait period [s]");
  synth->add_option("--rate", spec.sample_rate, "Sample rate [Hz]");
  synth->add_option("--duration", spec.duration, "Duration [s]");
  synth->add_option("--noise", spec.noise_sigma, "Noise std as a fraction of channel range");
  synth->add_option("--seed", spec.seed, "RNG seed");
  synth->add_option("--name", synth_stem, "File stem for the CSV and manifest");

  // grf-sweep
  auto* sweep = app.add_subcommand("grf-sweep", "GRF-threshold contact baseline");
  std::string sweep_manifest;
  std::size_t sweep_candidates = 200;
  sweep->add_option("manifest", sweep_manifest, "Manifest with grf and labels columns")->required();
  sweep->add_option("--candidates", sweep_candidates, "Threshold grid size")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*encode) {
      stage = "manifest";
      propimg::Manifest manifest = propimg::parse_manifest(encode_manifest);
      if (encode_stride > 0) manifest.stride = encode_stride;
      propimg::EncodeOptions opts;
      opts.cfg = encode_flags.config();
      opts.signals = split_list(encode_signals);
      opts.threads = threads_from_env(encode_threads, threads_opt->count() > 0);
      opts.split = encode_split;
      stage = "encode";
      const auto report = propimg::encode_dataset(manifest, encode_out, opts);
      std::cout << report.to_json() << '\n';
    } else if (*png) {
      stage = "png";
      propimg::PitHeader header;
      const auto record = propimg::read_pit_record(png_pit, png_index, &header);
      propimg::write_png(propimg::record_image(header, record), png_out);
      std::cout << "wrote " << png_out << " (" << header.width << "x" << header.height << ")\n";
    } else if (*inspect) {
      stage = "manifest";
      const propimg::Manifest manifest = propimg::parse_manifest(inspect_manifest);
      stage = "inspect";
      const auto result = propimg::inspect_window(manifest, inspect_index, inspect_channel,
                                                  inspect_flags.config());
      std::cout << result.to_json() << '\n';
    } else if (*bench) {
      stage = "bench";
      bench_opts.threads = threads_from_env(bench_opts.threads, bench_threads_opt->count() > 0);
      const auto report = propimg::run_benchmark(bench_opts);
      std::cout << report.to_json() << '\n';
    } else if (*synth) {
      stage = "synth";
      spec.gait = synth_gait == "crawl" ? propimg::GaitType::Crawl : propimg::GaitType::Trot;
      spec.friction = (synth_slippery || synth_friction == "slippery")
                          ? propimg::FrictionMode::Slippery
                          : propimg::FrictionMode::Stable;
      const auto log = propimg::generate_gait(spec);
      const auto manifest_path = propimg::write_gait_dataset(spec, log, synth_out, synth_stem);
      std::cout << "wrote " << manifest_path.string() << " (" << log.table.rows() << " rows)\n";
    } else if (*sweep) {
      stage = "manifest";
      const propimg::Manifest manifest = propimg::parse_manifest(sweep_manifest);
      stage = "grf-sweep";
      const auto table = propimg::read_csv(manifest.csv_path);
      std::array<std::vector<double>, 4> grf;
      std::array<std::vector<bool>, 4> contact;
      propimg::extract_grf_and_labels(manifest, table, grf, contact);
      const auto grid = propimg::grf_candidate_grid(grf, sweep_candidates);
      const auto best = propimg::sweep_grf_threshold(grf, contact, grid);
      nlohmann::json j;
      j["threshold"] = best.threshold;
      j["legs"] = {{"LF", best.leg_accuracy[0]}, {"RF", best.leg_accuracy[1]},
                   {"LH", best.leg_accuracy[2]}, {"RH", best.leg_accuracy[3]}};
      j["mean_accuracy"] = best.mean_accuracy;
      j["state_accuracy"] = best.state_accuracy;
      std::cout << j.dump(2) << '\n';
    }
  } catch (const Error& e) {
    std::cerr << "propimg: " << stage << " failed: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "propimg: " << stage << " failed: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
