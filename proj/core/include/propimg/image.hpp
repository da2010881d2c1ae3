#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace propimg {

// Dense 8-bit image, row-major and channel-last.
class Image {
 public:
  Image() = default;
  Image(std::size_t rows, std::size_t cols, std::size_t channels,
        std::uint8_t fill = 0);
  Image(std::size_t rows, std::size_t cols, std::size_t channels,
        std::vector<std::uint8_t> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t byte_size() const noexcept { return data_.size(); }

  std::uint8_t& at(std::size_t row, std::size_t col, std::size_t ch = 0) {
    return data_[(row * cols_ + col) * channels_ + ch];
  }
  std::uint8_t at(std::size_t row, std::size_t col,
                  std::size_t ch = 0) const {
    return data_[(row * cols_ + col) * channels_ + ch];
  }

  std::span<const std::uint8_t> bytes() const noexcept { return data_; }
  std::span<std::uint8_t> bytes() noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_ &&
           channels_ == other.channels_;
  }

  // Copy of a rectangular region (all channels).
  Image crop(std::size_t row0, std::size_t col0, std::size_t rows,
             std::size_t cols) const;
  // Copy `src` (same channel count) with its top-left corner at (row0, col0).
  void paste(const Image& src, std::size_t row0, std::size_t col0);
  // Single-channel copy of channel `ch`.
  Image channel(std::size_t ch) const;

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t channels_ = 0;
  std::vector<std::uint8_t> data_;
};

enum class SubImageKind { SlopeDynamics, SpikePatterns, GafPolar, Cymatic };

std::string_view to_string(SubImageKind kind) noexcept;

// One encoder's w x w single-channel output.
struct SubImage {
  SubImageKind kind = SubImageKind::SlopeDynamics;
  Image pixels;

  std::size_t size() const noexcept { return pixels.rows(); }
  std::uint8_t at(std::size_t row, std::size_t col) const {
    return pixels.at(row, col);
  }

  friend bool operator==(const SubImage&, const SubImage&) = default;
};

}  // namespace propimg
