#include "propimg/pit.hpp"

#include <algorithm>
#include <cstring>

#include "propimg/error.hpp"

namespace propimg {
namespace {

constexpr std::array<char, 4> kMagic{'P', 'I', 'T', '1'};

template <typename T>
void put_le(std::uint8_t* dst, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    dst[i] = static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i));
  }
}

template <typename T>
T get_le(const std::uint8_t* src) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(src[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

void check_pixels(const PitHeader& h, std::size_t n, std::uint64_t index) {
  if (n != h.record_bytes() - 2) {
    throw Error(ErrorCode::ShapeMismatch,
                "record " + std::to_string(index) + " has " + std::to_string(n) +
                    " pixel bytes, header declares " +
                    std::to_string(h.record_bytes() - 2));
  }
}

std::uintmax_t file_size_or_throw(const std::filesystem::path& path) {
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot stat " + path.string());
  return size;
}

PitHeader read_header(std::ifstream& in, const std::filesystem::path& path,
                      std::uintmax_t file_size) {
  std::array<std::uint8_t, kPitHeaderSize> raw{};
  const std::size_t got = std::min<std::uintmax_t>(file_size, kPitHeaderSize);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(got));
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  if (got >= 4 && std::memcmp(raw.data(), kMagic.data(), 4) != 0) {
    throw Error(ErrorCode::BadMagic, path.string());
  }
  if (got < kPitHeaderSize) {
    throw TruncatedFileError(got, "header of " + path.string() + " ends early");
  }
  return decode_pit_header(raw);
}

}  // namespace

std::string PitHeader::layout() const {
  const auto end = std::find(layout_tag.begin(), layout_tag.end(), '\0');
  return std::string(layout_tag.begin(), end);
}

void PitHeader::set_layout(std::string_view tag) {
  layout_tag.fill('\0');
  std::copy_n(tag.begin(), std::min(tag.size(), layout_tag.size()), layout_tag.begin());
}

std::array<std::uint8_t, kPitHeaderSize> encode_pit_header(const PitHeader& h) {
  std::array<std::uint8_t, kPitHeaderSize> b{};
  std::memcpy(b.data(), kMagic.data(), 4);
  put_le<std::uint16_t>(b.data() + 4, h.version);
  put_le<std::uint64_t>(b.data() + 6, h.record_count);
  put_le<std::uint32_t>(b.data() + 14, h.height);
  put_le<std::uint32_t>(b.data() + 18, h.width);
  put_le<std::uint32_t>(b.data() + 22, h.channels);
  b[26] = static_cast<std::uint8_t>(h.label_mode);
  std::memcpy(b.data() + 27, h.layout_tag.data(), h.layout_tag.size());
  return b;
}

PitHeader decode_pit_header(std::span<const std::uint8_t> b) {
  if (b.size() < 4 || std::memcmp(b.data(), kMagic.data(), 4) != 0) {
    throw Error(ErrorCode::BadMagic, "expected \"PIT1\"");
  }
  if (b.size() < kPitHeaderSize) {
    throw TruncatedFileError(b.size(), "header ends early");
  }
  PitHeader h;
  h.version = get_le<std::uint16_t>(b.data() + 4);
  if (h.version != kPitVersion) {
    throw Error(ErrorCode::UnsupportedVersion, "version " + std::to_string(h.version));
  }
  h.record_count = get_le<std::uint64_t>(b.data() + 6);
  h.height = get_le<std::uint32_t>(b.data() + 14);
  h.width = get_le<std::uint32_t>(b.data() + 18);
  h.channels = get_le<std::uint32_t>(b.data() + 22);
  h.label_mode = static_cast<LabelMode>(b[26]);
  std::memcpy(h.layout_tag.data(), b.data() + 27, h.layout_tag.size());
  return h;
}

std::uint64_t write_pit(const std::filesystem::path& path, PitHeader header,
                        std::span<const PitRecord> records) {
  PitWriter writer(path, header);
  for (const PitRecord& r : records) writer.append(r.label, r.pixels);
  return writer.finish();
}

PitFile read_pit(const std::filesystem::path& path) {
  const auto size = file_size_or_throw(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  PitFile file;
  file.header = read_header(in, path, size);

  const std::uint64_t rec = file.header.record_bytes();
  const std::uint64_t available = size - kPitHeaderSize;
  if (available / rec < file.header.record_count) {
    const std::uint64_t complete = available / rec;
    throw TruncatedFileError(kPitHeaderSize + complete * rec,
                             "record " + std::to_string(complete) + " of " +
                                 std::to_string(file.header.record_count) +
                                 " in " + path.string() + " is incomplete");
  }

  file.records.resize(file.header.record_count);
  std::vector<std::uint8_t> buf(rec);
  for (PitRecord& r : file.records) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(rec));
    if (!in) throw Error(ErrorCode::IoFailure, "read failed in " + path.string());
    r.label = get_le<std::uint16_t>(buf.data());
    r.pixels.assign(buf.begin() + 2, buf.end());
  }
  return file;
}

PitRecord read_pit_record(const std::filesystem::path& path, std::uint64_t index,
                          PitHeader* header_out) {
  const auto size = file_size_or_throw(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const PitHeader h = read_header(in, path, size);
  if (header_out) *header_out = h;
  if (index >= h.record_count) {
    throw Error(ErrorCode::IndexOutOfRange,
                "record " + std::to_string(index) + " requested, file holds " +
                    std::to_string(h.record_count));
  }
  const std::uint64_t rec = h.record_bytes();
  const std::uint64_t offset = kPitHeaderSize + index * rec;
  if (offset + rec > size) {
    throw TruncatedFileError(offset, "record " + std::to_string(index) + " in " +
                                         path.string() + " is incomplete");
  }
  in.seekg(static_cast<std::streamoff>(offset));
  std::vector<std::uint8_t> buf(rec);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(rec));
  if (!in) throw Error(ErrorCode::IoFailure, "read failed in " + path.string());
  return {get_le<std::uint16_t>(buf.data()), {buf.begin() + 2, buf.end()}};
}

Image record_image(const PitHeader& header, const PitRecord& record) {
  return Image(header.height, header.width, header.channels, record.pixels);
}

// ---------------------------------------------------------------------------

PitWriter::PitWriter(const std::filesystem::path& path, PitHeader header)
    : path_(path), header_(header) {
  header_.version = kPitVersion;
  header_.record_count = 0;
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error(ErrorCode::IoFailure, "cannot create " + path.string());
  const auto raw = encode_pit_header(header_);
  out_.write(reinterpret_cast<const char*>(raw.data()), raw.size());
}

PitWriter::~PitWriter() {
  if (!finished_) {
    try {
      finish();
    } catch (...) {
    }
  }
}

void PitWriter::append(std::uint16_t label, std::span<const std::uint8_t> pixels) {
  check_pixels(header_, pixels.size(), header_.record_count);
  std::array<std::uint8_t, 2> l{};
  put_le<std::uint16_t>(l.data(), label);
  out_.write(reinterpret_cast<const char*>(l.data()), 2);
  out_.write(reinterpret_cast<const char*>(pixels.data()),
             static_cast<std::streamsize>(pixels.size()));
  if (!out_) throw Error(ErrorCode::IoFailure, "write failed for " + path_.string());
  ++header_.record_count;
}

std::uint64_t PitWriter::finish() {
  if (finished_) return header_.record_count;
  finished_ = true;
  const auto raw = encode_pit_header(header_);
  out_.seekp(0);
  out_.write(reinterpret_cast<const char*>(raw.data()), raw.size());
  out_.close();
  if (!out_) throw Error(ErrorCode::IoFailure, "write failed for " + path_.string());
  return header_.record_count;
}

}  // namespace propimg
