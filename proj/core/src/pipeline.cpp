#include "propimg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "json.hpp"
#include "propimg/error.hpp"

namespace propimg {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::array<GlobalBounds, 3> triplet_bounds(const Manifest& m,
                                           const std::array<std::size_t, 3>& idx) {
  return {m.channels[idx[0]].bounds, m.channels[idx[1]].bounds,
          m.channels[idx[2]].bounds};
}

void write_index(const std::filesystem::path& out_dir, const Manifest& manifest,
                 const EncodeOptions& options, const RunReport& report) {
  const auto path = out_dir / "index.json";
  json index;
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    try {
      index = json::parse(in);
    } catch (const json::exception&) {
      index = json::object();
    }
  }
  if (!index.is_object()) index = json::object();
  index["format"] = "propimg-index";
  index["version"] = 1;
  index["layout_tag"] = std::string(kLayoutTag);
  index["tile_layout"] = {{"slope_dynamics", "spike_patterns"}, {"gaf_polar", "cymatic"}};
  index["leg_layout"] = {{"LF", "RF"}, {"LH", "RH"}};
  index["label_encoding"] = {{"LF", 3}, {"RF", 2}, {"LH", 1}, {"RH", 0}};
  index["unlabeled"] = kUnlabeled;
  index["window"] = options.cfg.window_w;

  json split;
  split["manifest_csv"] = manifest.csv_path.filename().string();
  split["stride"] = manifest.stride;
  split["spike_alpha"] = options.cfg.spike_alpha;
  split["record_count"] = report.processed;
  split["metadata"] = json::parse(manifest.metadata_json);
  json files = json::array();
  for (const OutputFile& f : report.outputs) {
    files.push_back({{"path", f.path.generic_string()},
                     {"signal_kind", f.signal_kind},
                     {"scope", f.scope},
                     {"height", f.height},
                     {"width", f.width},
                     {"channels", 3},
                     {"records", f.records}});
  }
  split["files"] = std::move(files);
  if (!index.contains("splits") || !index["splits"].is_object()) index["splits"] = json::object();
  index["splits"][options.split] = std::move(split);

  std::ofstream out(path, std::ios::trunc);
  out << index.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

}  // namespace

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

ProprioImage encode_leg_group(const std::array<std::array<Window, 3>, 4>& legs,
                              const std::array<std::array<GlobalBounds, 3>, 4>& bounds,
                              const EncoderConfig& cfg, const std::string& kind) {
  LegPiMap map;
  for (Leg leg : kLegs) {
    const auto l = static_cast<std::size_t>(leg);
    map[leg] = compose_leg_pi(build_signal_group_pi(legs[l], bounds[l], cfg), leg, kind);
  }
  return compose_body_pi(map);
}

ProprioImage encode_group(const Manifest& manifest, const SignalGroup& group,
                          const GroupWindows& windows, const EncoderConfig& cfg) {
  if (windows.triplets.size() != group.triplets.size()) {
    throw Error(ErrorCode::ShapeMismatch, "window set does not match group " + group.kind);
  }
  if (!group.is_leg) {
    return compose_trunk_pi(
        build_signal_group_pi(windows.triplets[0], triplet_bounds(manifest, group.triplets[0]), cfg),
        group.kind);
  }
  std::array<std::array<Window, 3>, 4> legs;
  std::array<std::array<GlobalBounds, 3>, 4> bounds;
  for (std::size_t l = 0; l < 4; ++l) {
    legs[l] = windows.triplets[l];
    bounds[l] = triplet_bounds(manifest, group.triplets[l]);
  }
  return encode_leg_group(legs, bounds, cfg, group.kind);
}

std::string pit_file_name(const SignalGroup& group) {
  return group.kind + (group.is_leg ? "_body.pit" : "_trunk.pit");
}

void export_png(const ProprioImage& pi, const std::filesystem::path& path) {
  write_png(pi.pixels, path);
}

// ---------------------------------------------------------------------------

RunReport encode_dataset(const Manifest& manifest_in, const std::filesystem::path& out_dir,
                         const EncodeOptions& options) {
  options.cfg.validate();
  const auto t_start = Clock::now();

  Manifest manifest = manifest_in;
  manifest.window_w = options.cfg.window_w;

  // Selected groups, in manifest order.
  std::vector<std::size_t> selected;
  for (const std::string& kind : options.signals) {
    if (!manifest.find_group(kind)) {
      throw Error(ErrorCode::MissingColumn, "signal kind '" + kind + "' is not in the manifest");
    }
  }
  for (std::size_t g = 0; g < manifest.groups.size(); ++g) {
    const auto& kind = manifest.groups[g].kind;
    if (options.signals.empty() ||
        std::find(options.signals.begin(), options.signals.end(), kind) != options.signals.end()) {
      selected.push_back(g);
    }
  }

  RunReport report;
  report.threads = std::max(1u, options.threads);

  auto t0 = Clock::now();
  WindowStream stream(manifest);
  report.read_seconds += seconds_since(t0);
  report.candidates = stream.candidates();

  const std::filesystem::path rel_dir =
      options.split == "all" ? std::filesystem::path{} : std::filesystem::path{options.split};
  std::error_code ec;
  std::filesystem::create_directories(out_dir / rel_dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + (out_dir / rel_dir).string());

  const std::uint32_t w = static_cast<std::uint32_t>(manifest.window_w);
  std::vector<std::unique_ptr<PitWriter>> writers;
  for (std::size_t g : selected) {
    const SignalGroup& group = manifest.groups[g];
    OutputFile f;
    f.path = rel_dir / pit_file_name(group);
    f.signal_kind = group.kind;
    f.scope = group.is_leg ? "body" : "trunk";
    f.height = f.width = group.is_leg ? 4 * w : 2 * w;
    report.outputs.push_back(f);

    PitHeader h;
    h.height = f.height;
    h.width = f.width;
    h.channels = 3;
    h.label_mode = manifest.label_columns ? LabelMode::Contact16 : LabelMode::None;
    h.set_layout(kLayoutTag);
    writers.push_back(std::make_unique<PitWriter>(out_dir / f.path, h));
  }

  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  std::vector<LabeledWindowSet> sets;
  std::vector<std::vector<ProprioImage>> encoded;
  bool done = false;
  while (!done) {
    t0 = Clock::now();
    sets.clear();
    while (sets.size() < batch) {
      auto set = stream.next();
      if (!set) {
        done = true;
        break;
      }
      sets.push_back(std::move(*set));
    }
    report.read_seconds += seconds_since(t0);
    if (sets.empty()) break;

    t0 = Clock::now();
    encoded.assign(sets.size(), {});
    parallel_for(sets.size(), report.threads, [&](std::size_t i) {
      std::vector<ProprioImage> out;
      out.reserve(selected.size());
      for (std::size_t g : selected) {
        out.push_back(encode_group(manifest, manifest.groups[g], sets[i].groups[g], options.cfg));
      }
      encoded[i] = std::move(out);
    });
    report.encode_seconds += seconds_since(t0);

    t0 = Clock::now();
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const std::uint16_t label = sets[i].contact_state ? *sets[i].contact_state : kUnlabeled;
      for (std::size_t k = 0; k < writers.size(); ++k) {
        writers[k]->append(label, encoded[i][k].pixels.bytes());
      }
    }
    report.processed += sets.size();
    report.write_seconds += seconds_since(t0);
  }

  t0 = Clock::now();
  for (std::size_t k = 0; k < writers.size(); ++k) report.outputs[k].records = writers[k]->finish();
  report.skipped = stream.skipped();
  write_index(out_dir, manifest, options, report);
  report.write_seconds += seconds_since(t0);

  report.wall_seconds = seconds_since(t_start);
  const double images = static_cast<double>(report.processed * selected.size());
  report.images_per_second = report.wall_seconds > 0 ? images / report.wall_seconds : 0.0;
  return report;
}

std::string RunReport::to_json() const {
  json j;
  j["candidates"] = candidates;
  j["processed"] = processed;
  j["skipped"] = skipped;
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;
  j["stages"] = {{"read_seconds", read_seconds},
                 {"encode_seconds", encode_seconds},
                 {"write_seconds", write_seconds}};
  j["images_per_second"] = images_per_second;
  json files = json::array();
  for (const OutputFile& f : outputs) {
    files.push_back({{"path", f.path.generic_string()},
                     {"signal_kind", f.signal_kind},
                     {"scope", f.scope},
                     {"records", f.records}});
  }
  j["outputs"] = std::move(files);
  return j.dump(2);
}

// ---------------------------------------------------------------------------

InspectResult inspect_window(const Manifest& manifest_in, std::size_t window_index,
                             const std::string& channel, const EncoderConfig& cfg) {
  cfg.validate();
  Manifest manifest = manifest_in;
  manifest.window_w = cfg.window_w;

  std::size_t ci = manifest.channels.size();
  for (std::size_t i = 0; i < manifest.channels.size(); ++i) {
    if (manifest.channels[i].column == channel) ci = i;
  }
  if (ci == manifest.channels.size()) throw Error(ErrorCode::MissingColumn, channel);
  const ChannelBinding& binding = manifest.channels[ci];

  WindowStream stream(manifest);
  if (window_index >= stream.candidates()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "window index " + std::to_string(window_index) + ", log has " +
                    std::to_string(stream.candidates()) + " windows");
  }
  const std::size_t end_row = manifest.window_w - 1 + window_index * manifest.stride;
  const auto set = stream.window_at(end_row);
  if (!set) {
    throw Error(ErrorCode::NonFiniteInput,
                "window " + std::to_string(window_index) + " contains NaN samples");
  }

  // Locate the triplet holding this channel.
  const SignalGroup* group = manifest.find_group(binding.kind);
  std::size_t gi = static_cast<std::size_t>(group - manifest.groups.data());
  std::size_t ti = 0;
  for (std::size_t t = 0; t < group->triplets.size(); ++t) {
    if (group->triplets[t][binding.component] == ci) ti = t;
  }
  const auto& windows = set->groups[gi].triplets[ti];
  const TripletEncoding enc =
      encode_triplet(windows, triplet_bounds(manifest, group->triplets[ti]), cfg);

  InspectResult r;
  r.window_index = window_index;
  r.end_row = end_row;
  r.channel = channel;
  r.signal_kind = binding.kind;
  r.component = binding.component;
  const Window& win = windows[binding.component];
  r.values.assign(win.values().begin(), win.values().end());
  r.normalized = normalize_global(win, binding.bounds);
  r.bounds = binding.bounds;
  r.slope = enc.slope[binding.component];
  r.spikes = enc.spikes[binding.component];
  r.local_range = enc.local_ranges[binding.component];
  r.deviation = enc.deviations[binding.component];
  r.descriptor = enc.descriptor;
  r.cymatic = enc.cymatic;
  return r;
}

std::string InspectResult::to_json() const {
  json j;
  j["window_index"] = window_index;
  j["end_row"] = end_row;
  j["channel"] = channel;
  j["signal_kind"] = signal_kind;
  j["component"] = component;
  j["values"] = values;
  j["global_bounds"] = {bounds.min, bounds.max};
  j["normalized"] = normalized;
  j["local_range"] = {local_range.min, local_range.max};
  j["deviation"] = {{"delta_min", deviation.delta_min}, {"delta_max", deviation.delta_max}};
  j["slope"] = {{"slope", slope.slope},
                {"slope_hat", slope.slope_hat},
                {"jerk", slope.jerk},
                {"jerk_hat", slope.jerk_hat},
                {"peak_count", slope.peak_count},
                {"peak_density", slope.peak_density},
                {"ripple_freq", slope.ripple_freq},
                {"center_x", slope.center_x},
                {"center_y", slope.center_y},
                {"sigma_g", slope.sigma_g}};
  j["spikes"] = {{"median_x", spikes.median_x},
                 {"mad_x", spikes.mad_x},
                 {"threshold", spikes.threshold},
                 {"median_delta", spikes.median_delta},
                 {"mad_delta", spikes.mad_delta},
                 {"gated_count", spikes.gated_count}};
  j["descriptor"] = descriptor;
  j["cymatic"] = {{"k_r", cymatic.k_r},
                  {"k_t", cymatic.k_t},
                  {"phi_r", cymatic.phi_r},
                  {"phi_t", cymatic.phi_t},
                  {"alpha_mod", cymatic.alpha_mod},
                  {"blend", cymatic.blend}};
  // nlohmann emits doubles with round-trip precision.
  return j.dump(2);
}

// ---------------------------------------------------------------------------

namespace {

struct BenchInput {
  std::array<std::array<Window, 3>, 4> legs;
};

std::vector<BenchInput> make_bench_inputs(std::size_t count, std::size_t w,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> level(-0.6, 0.6);
  std::normal_distribution<double> step(0.0, 0.08);
  std::vector<BenchInput> inputs(count);
  for (BenchInput& in : inputs) {
    for (auto& triplet : in.legs) {
      for (Window& win : triplet) {
        std::vector<double> v(w);
        double x = level(rng);
        for (double& s : v) {
          x = std::clamp(x + step(rng), -1.2, 1.2);
          s = x;
        }
        win = Window(std::move(v));
      }
    }
  }
  return inputs;
}

}  // namespace

BenchReport run_benchmark(const BenchOptions& options) {
  const auto t_start = Clock::now();
  BenchReport report;
  report.options = options;
  report.options.threads = std::max(1u, options.threads);
  report.hardware_threads = std::thread::hardware_concurrency();

  EncoderConfig cfg;
  cfg.window_w = options.window;
  cfg.validate();
  std::array<std::array<GlobalBounds, 3>, 4> bounds;
  for (auto& b : bounds) b.fill(GlobalBounds{-1.0, 1.0});

  constexpr std::size_t kDistinctInputs = 64;
  const auto inputs = make_bench_inputs(kDistinctInputs, options.window, options.seed);
  const std::size_t iters = std::max<std::size_t>(1, options.iters);

  // Warm-up.
  for (std::size_t i = 0; i < std::min<std::size_t>(iters, 16); ++i) {
    (void)encode_leg_group(inputs[i % kDistinctInputs].legs, bounds, cfg);
  }

  std::vector<double> per_leg_ms(iters);
  const auto t_single = Clock::now();
  for (std::size_t i = 0; i < iters; ++i) {
    const auto t0 = Clock::now();
    const ProprioImage body = encode_leg_group(inputs[i % kDistinctInputs].legs, bounds, cfg);
    per_leg_ms[i] = seconds_since(t0) * 1e3 / 4.0;
  }
  const double single_wall = seconds_since(t_single);

  double sum = 0.0;
  for (double v : per_leg_ms) sum += v;
  std::vector<double> sorted = per_leg_ms;
  std::sort(sorted.begin(), sorted.end());
  report.single.mean_ms = sum / static_cast<double>(iters);
  report.single.median_ms = percentile_sorted(sorted, 0.5);
  report.single.p99_ms = percentile_sorted(sorted, 0.99);
  report.single.images_per_second = 4.0 * static_cast<double>(iters) / single_wall;

  const unsigned threads = report.options.threads;
  const auto t_multi = Clock::now();
  parallel_for(threads, threads, [&](std::size_t t) {
    for (std::size_t i = t; i < iters * threads; i += threads) {
      (void)encode_leg_group(inputs[i % kDistinctInputs].legs, bounds, cfg);
    }
  });
  const double multi_wall = seconds_since(t_multi);
  report.multi_images_per_second =
      4.0 * static_cast<double>(iters * threads) / multi_wall;

  report.wall_seconds = seconds_since(t_start);
  return report;
}

std::string BenchReport::to_json() const {
  json j;
  j["window"] = options.window;
  j["iters"] = options.iters;
  j["threads"] = options.threads;
  j["hardware_threads"] = hardware_threads;
  j["single_thread"] = {{"mean_ms_per_leg_pi", single.mean_ms},
                        {"median_ms_per_leg_pi", single.median_ms},
                        {"p99_ms_per_leg_pi", single.p99_ms},
                        {"images_per_second", single.images_per_second}};
  j["multi_thread"] = {{"threads", options.threads},
                       {"images_per_second", multi_images_per_second}};
  j["reference_ms"] = kReferenceLatencyMs;
  j["target_ms"] = kTargetLatencyMs;
  j["within_reference"] = within_reference();
  j["within_target"] = within_target();
  j["wall_seconds"] = wall_seconds;
  return j.dump(2);
}

}  // namespace propimg
