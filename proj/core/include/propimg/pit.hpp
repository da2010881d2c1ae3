#pragma once

// PIT: flat little-endian container of equally shaped u8 images plus labels.
//
//   offset size  field
//        0    4  magic "PIT1"
//        4    2  version (1)
//        6    8  record_count
//       14    4  height
//       18    4  width
//       22    4  channels
//       26    1  label_mode (0 = none, 1 = contact16)
//       27   16  layout_tag, ASCII, NUL padded
//       43   21  zero
//   then record_count x { u16 label, height*width*channels bytes }
//
// Unlabeled records carry label 0xFFFF.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propimg/image.hpp"

namespace propimg {

inline constexpr std::size_t kPitHeaderSize = 64;
inline constexpr std::uint16_t kPitVersion = 1;
inline constexpr std::uint16_t kUnlabeled = 0xFFFF;

enum class LabelMode : std::uint8_t { None = 0, Contact16 = 1 };

struct PitHeader {
  std::uint16_t version = kPitVersion;
  std::uint64_t record_count = 0;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 3;
  LabelMode label_mode = LabelMode::None;
  std::array<char, 16> layout_tag{};

  std::size_t record_bytes() const {
    return 2 + std::size_t{height} * width * channels;
  }
  std::string layout() const;
  void set_layout(std::string_view tag);  // truncated to 16 bytes

  friend bool operator==(const PitHeader&, const PitHeader&) = default;
};

struct PitRecord {
  std::uint16_t label = kUnlabeled;
  std::vector<std::uint8_t> pixels;

  friend bool operator==(const PitRecord&, const PitRecord&) = default;
};

std::array<std::uint8_t, kPitHeaderSize> encode_pit_header(const PitHeader& h);
PitHeader decode_pit_header(std::span<const std::uint8_t> bytes);

// Writes header + records; header.record_count is taken from `records`.
// Returns the number of records written. Errors: IoFailure, ShapeMismatch.
std::uint64_t write_pit(const std::filesystem::path& path, PitHeader header,
                        std::span<const PitRecord> records);

struct PitFile {
  PitHeader header;
  std::vector<PitRecord> records;
};

// Errors: IoFailure, BadMagic, UnsupportedVersion, TruncatedFile.
PitFile read_pit(const std::filesystem::path& path);

// Random access to one record without loading the whole file.
PitRecord read_pit_record(const std::filesystem::path& path, std::uint64_t index,
                          PitHeader* header_out = nullptr);

Image record_image(const PitHeader& header, const PitRecord& record);

// Appends records one at a time and patches record_count on finish().
class PitWriter {
 public:
  PitWriter(const std::filesystem::path& path, PitHeader header);
  ~PitWriter();
  PitWriter(const PitWriter&) = delete;
  PitWriter& operator=(const PitWriter&) = delete;

  void append(std::uint16_t label, std::span<const std::uint8_t> pixels);
  std::uint64_t finish();
  std::uint64_t count() const { return header_.record_count; }

 private:
  std::filesystem::path path_;
  PitHeader header_;
  std::ofstream out_;
  bool finished_ = false;
};

// ---------------------------------------------------------------------------
// PNG (8-bit gray or RGB). Errors: IoFailure, ShapeMismatch.

void write_png(const Image& image, const std::filesystem::path& path);
Image read_png(const std::filesystem::path& path);

}  // namespace propimg
