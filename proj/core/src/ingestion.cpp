#include "propimg/ingestion.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "propimg/error.hpp"

namespace propimg {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::MalformedManifest, field + ": " + why);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  if (cell.empty()) return std::nan("");
  if (cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::MalformedManifest,
                "CSV cell at row " + std::to_string(row) + ", column " +
                    std::to_string(col) + " is not a number: '" +
                    std::string(cell) + "'");
  }
  return v;
}

MorphologySlot parse_slot(const std::string& s, const std::string& field) {
  for (Leg leg : kLegs) {
    if (s == to_string(leg)) return leg;
  }
  if (s == "trunk") return TrunkSlot{};
  malformed(field, "unknown slot '" + s + "' (expected LF, RF, LH, RH or trunk)");
}

std::size_t parse_component(const std::string& s, bool leg,
                            const std::string& field) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (s == to_string(kAxes[i])) return i;
    if (leg && s == to_string(kJoints[i])) return i;
  }
  malformed(field, "unknown component '" + s + "'");
}

std::array<std::string, 4> parse_leg_columns(const json& obj,
                                             const std::string& field) {
  if (!obj.is_object()) malformed(field, "expected an object keyed by leg");
  std::array<std::string, 4> cols;
  for (Leg leg : kLegs) {
    const std::string key(to_string(leg));
    if (!obj.contains(key) || !obj[key].is_string()) {
      malformed(field + "." + key, "missing column name");
    }
    cols[static_cast<std::size_t>(leg)] = obj[key].get<std::string>();
  }
  return cols;
}

std::string slot_name(const MorphologySlot& slot) {
  if (const Leg* leg = std::get_if<Leg>(&slot)) return std::string(to_string(*leg));
  return "trunk";
}

}  // namespace

const SignalGroup* Manifest::find_group(const std::string& kind) const {
  for (const SignalGroup& g : groups) {
    if (g.kind == kind) return &g;
  }
  return nullptr;
}

void resolve_groups(Manifest& m) {
  m.groups.clear();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::map<std::string, std::size_t> by_kind;
  // Per group: 4 x 3 slots for legs, 1 x 3 for trunk.
  std::vector<std::vector<std::array<std::size_t, 3>>> slots;

  for (std::size_t ci = 0; ci < m.channels.size(); ++ci) {
    const ChannelBinding& ch = m.channels[ci];
    const bool is_leg = std::holds_alternative<Leg>(ch.slot);
    auto [it, inserted] = by_kind.try_emplace(ch.kind, m.groups.size());
    if (inserted) {
      m.groups.push_back(SignalGroup{ch.kind, is_leg, {}});
      slots.emplace_back(is_leg ? 4 : 1, std::array<std::size_t, 3>{kUnset, kUnset, kUnset});
    }
    SignalGroup& g = m.groups[it->second];
    if (g.is_leg != is_leg) {
      malformed("channels[" + std::to_string(ci) + "]",
                "signal kind '" + ch.kind + "' mixes leg and trunk slots");
    }
    const std::size_t t = is_leg ? static_cast<std::size_t>(std::get<Leg>(ch.slot)) : 0;
    std::size_t& cell = slots[it->second][t][ch.component];
    if (cell != kUnset) {
      malformed("channels[" + std::to_string(ci) + "]",
                "duplicate binding for " + ch.kind + "/" + slot_name(ch.slot));
    }
    cell = ci;
  }

  for (std::size_t gi = 0; gi < m.groups.size(); ++gi) {
    for (std::size_t t = 0; t < slots[gi].size(); ++t) {
      for (std::size_t c = 0; c < 3; ++c) {
        if (slots[gi][t][c] == kUnset) {
          const std::string where =
              m.groups[gi].is_leg ? std::string(to_string(kLegs[t])) : "trunk";
          malformed("channels", "signal kind '" + m.groups[gi].kind +
                                    "' lacks component " + std::to_string(c) +
                                    " for " + where);
        }
      }
    }
    m.groups[gi].triplets = std::move(slots[gi]);
  }
}

Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    malformed(path.string(), e.what());
  }
  if (!doc.is_object()) malformed(path.string(), "top level must be an object");

  Manifest m;
  try {
    if (!doc.contains("csv") || !doc["csv"].is_string()) malformed("csv", "missing");
    m.csv_path = path.parent_path() / doc["csv"].get<std::string>();
    m.time_column = doc.value("time_column", std::string("t"));
    if (!doc.contains("sample_rate") || !doc["sample_rate"].is_number()) {
      malformed("sample_rate", "missing");
    }
    m.sample_rate = doc["sample_rate"].get<double>();
    if (!(m.sample_rate > 0.0)) malformed("sample_rate", "must be > 0");
    const auto window = doc.value("window", std::int64_t{10});
    const auto stride = doc.value("stride", std::int64_t{1});
    if (window < static_cast<std::int64_t>(kMinWindow)) malformed("window", "must be >= 4");
    if (stride < 1) malformed("stride", "must be >= 1");
    m.window_w = static_cast<std::size_t>(window);
    m.stride = static_cast<std::size_t>(stride);

    if (!doc.contains("channels") || !doc["channels"].is_array() || doc["channels"].empty()) {
      malformed("channels", "must be a non-empty array");
    }
    for (std::size_t i = 0; i < doc["channels"].size(); ++i) {
      const json& c = doc["channels"][i];
      const std::string field = "channels[" + std::to_string(i) + "]";
      for (const char* key : {"column", "kind", "slot", "component"}) {
        if (!c.contains(key) || !c[key].is_string()) malformed(field + "." + key, "missing");
      }
      ChannelBinding b;
      b.column = c["column"].get<std::string>();
      b.kind = c["kind"].get<std::string>();
      b.slot = parse_slot(c["slot"].get<std::string>(), field + ".slot");
      b.component_label = c["component"].get<std::string>();
      b.component = parse_component(b.component_label,
                                    std::holds_alternative<Leg>(b.slot),
                                    field + ".component");
      if (!c.contains("bounds") || !c["bounds"].is_array() || c["bounds"].size() != 2 ||
          !c["bounds"][0].is_number() || !c["bounds"][1].is_number()) {
        malformed(field + ".bounds", "expected [min, max]");
      }
      b.bounds = {c["bounds"][0].get<double>(), c["bounds"][1].get<double>()};
      if (!std::isfinite(b.bounds.min) || !std::isfinite(b.bounds.max) ||
          !(b.bounds.max > b.bounds.min)) {
        throw Error(ErrorCode::InvalidBounds,
                    field + ".bounds (" + b.column + ") requires min < max");
      }
      m.channels.push_back(std::move(b));
    }
    if (doc.contains("labels")) m.label_columns = parse_leg_columns(doc["labels"], "labels");
    if (doc.contains("grf")) m.grf_columns = parse_leg_columns(doc["grf"], "grf");
    if (doc.contains("metadata")) m.metadata_json = doc["metadata"].dump();
  } catch (const json::exception& e) {
    malformed(path.string(), e.what());
  }
  resolve_groups(m);

  const std::vector<std::string> header = read_csv_header(m.csv_path);
  auto require = [&](const std::string& col) {
    if (std::find(header.begin(), header.end(), col) == header.end()) {
      throw Error(ErrorCode::MissingColumn, col);
    }
  };
  require(m.time_column);
  for (const ChannelBinding& b : m.channels) require(b.column);
  if (m.label_columns) for (const auto& c : *m.label_columns) require(c);
  if (m.grf_columns) for (const auto& c : *m.grf_columns) require(c);
  return m;
}

std::string manifest_to_json(const Manifest& m,
                             const std::filesystem::path& manifest_dir) {
  json doc;
  doc["csv"] = std::filesystem::relative(m.csv_path, manifest_dir).generic_string();
  doc["time_column"] = m.time_column;
  doc["sample_rate"] = m.sample_rate;
  doc["window"] = m.window_w;
  doc["stride"] = m.stride;
  json channels = json::array();
  for (const ChannelBinding& b : m.channels) {
    const bool leg = std::holds_alternative<Leg>(b.slot);
    const std::string component =
        !b.component_label.empty() ? b.component_label
        : leg                      ? std::string(to_string(kJoints[b.component]))
                                   : std::string(to_string(kAxes[b.component]));
    channels.push_back({{"column", b.column},
                        {"kind", b.kind},
                        {"slot", slot_name(b.slot)},
                        {"component", component},
                        {"bounds", {b.bounds.min, b.bounds.max}}});
  }
  doc["channels"] = std::move(channels);
  auto legs_obj = [](const std::array<std::string, 4>& cols) {
    json o;
    for (Leg leg : kLegs) o[std::string(to_string(leg))] = cols[static_cast<std::size_t>(leg)];
    return o;
  };
  if (m.label_columns) doc["labels"] = legs_obj(*m.label_columns);
  if (m.grf_columns) doc["grf"] = legs_obj(*m.grf_columns);
  doc["metadata"] = json::parse(m.metadata_json);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::size_t SignalTable::column_index(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, name);
  return static_cast<std::size_t>(it - header.begin());
}

std::vector<std::string> read_csv_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open CSV " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::TooFewRows, "CSV " + path.string() + " has no header");
  }
  std::vector<std::string> header;
  for (std::string_view cell : split_commas(line)) header.emplace_back(cell);
  return header;
}

SignalTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open CSV " + path.string());
  SignalTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::TooFewRows, "CSV " + path.string() + " has no header");
  }
  for (std::string_view cell : split_commas(line)) table.header.emplace_back(cell);
  table.columns.resize(table.header.size());

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::MalformedManifest,
                  "CSV row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(table.header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      table.columns[c].push_back(parse_cell(cells[c], row, c));
    }
    ++row;
  }
  return table;
}

// ---------------------------------------------------------------------------

std::uint8_t encode_contact_state(const std::array<bool, 4>& flags) {
  std::uint8_t state = 0;
  for (Leg leg : kLegs) {
    if (flags[static_cast<std::size_t>(leg)]) {
      state = static_cast<std::uint8_t>(state | contact_bit(leg));
    }
  }
  return state;
}

WindowStream::WindowStream(Manifest manifest)
    : WindowStream(manifest, read_csv(manifest.csv_path)) {}

WindowStream::WindowStream(Manifest manifest, SignalTable table)
    : manifest_(std::move(manifest)), table_(std::move(table)) {
  prepare();
}

void WindowStream::prepare() {
  const std::size_t w = manifest_.window_w;
  const std::size_t rows = table_.rows();
  if (w < kMinWindow) throw Error(ErrorCode::InvalidConfig, "window must be >= 4");
  if (manifest_.stride < 1) throw Error(ErrorCode::InvalidConfig, "stride must be >= 1");
  if (rows < w) {
    throw Error(ErrorCode::TooFewRows, std::to_string(rows) + " rows, window needs " +
                                           std::to_string(w));
  }
  time_col_ = table_.column_index(manifest_.time_column);
  const auto& time = table_.columns[time_col_];
  for (std::size_t r = 1; r < rows; ++r) {
    if (!(time[r] > time[r - 1])) {
      throw Error(ErrorCode::NonMonotonicTime,
                  "time does not increase at row " + std::to_string(r));
    }
  }

  channel_cols_.clear();
  for (const ChannelBinding& b : manifest_.channels) {
    channel_cols_.push_back(table_.column_index(b.column));
  }
  label_cols_.clear();
  if (manifest_.label_columns) {
    for (const auto& c : *manifest_.label_columns) label_cols_.push_back(table_.column_index(c));
  }

  bad_prefix_.assign(rows + 1, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    bool bad = false;
    for (std::size_t c : channel_cols_) bad = bad || !std::isfinite(table_.columns[c][r]);
    for (std::size_t c : label_cols_) bad = bad || !std::isfinite(table_.columns[c][r]);
    bad_prefix_[r + 1] = bad_prefix_[r] + (bad ? 1 : 0);
  }

  candidates_ = (rows - w) / manifest_.stride + 1;
  next_end_ = w - 1;
  skipped_ = 0;
  emitted_ = 0;
}

std::optional<LabeledWindowSet> WindowStream::window_at(std::size_t end_row) const {
  const std::size_t w = manifest_.window_w;
  if (end_row + 1 < w || end_row >= table_.rows()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "window ending at row " + std::to_string(end_row) + " is outside the log");
  }
  const std::size_t start = end_row + 1 - w;
  if (bad_prefix_[end_row + 1] != bad_prefix_[start]) return std::nullopt;

  LabeledWindowSet set;
  set.timestep = end_row;
  set.time = table_.columns[time_col_][end_row];
  auto window_of = [&](std::size_t channel) {
    const auto& col = table_.columns[channel_cols_[channel]];
    return Window(std::vector<double>(col.begin() + static_cast<std::ptrdiff_t>(start),
                                      col.begin() + static_cast<std::ptrdiff_t>(end_row + 1)));
  };
  set.groups.reserve(manifest_.groups.size());
  for (const SignalGroup& g : manifest_.groups) {
    GroupWindows gw;
    for (const auto& triplet : g.triplets) {
      gw.triplets.push_back({window_of(triplet[0]), window_of(triplet[1]),
                             window_of(triplet[2])});
    }
    set.groups.push_back(std::move(gw));
  }
  if (!label_cols_.empty()) {
    std::array<bool, 4> flags{};
    for (std::size_t k = 0; k < 4; ++k) flags[k] = table_.columns[label_cols_[k]][end_row] > 0.5;
    set.contact_state = encode_contact_state(flags);
  }
  return set;
}

std::optional<LabeledWindowSet> WindowStream::next() {
  while (next_end_ < table_.rows()) {
    const std::size_t end = next_end_;
    next_end_ += manifest_.stride;
    if (auto set = window_at(end)) {
      ++emitted_;
      return set;
    }
    ++skipped_;
  }
  return std::nullopt;
}

WindowSetBatch stream_windows(const Manifest& manifest) {
  WindowStream stream(manifest);
  WindowSetBatch batch;
  while (auto set = stream.next()) batch.sets.push_back(std::move(*set));
  batch.candidates = stream.candidates();
  batch.skipped = stream.skipped();
  return batch;
}

}  // namespace propimg
