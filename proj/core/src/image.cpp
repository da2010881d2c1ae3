#include "propimg/image.hpp"

#include <algorithm>
#include <string>

#include "propimg/error.hpp"

namespace propimg {

Image::Image(std::size_t rows, std::size_t cols, std::size_t channels,
             std::uint8_t fill)
    : rows_(rows),
      cols_(cols),
      channels_(channels),
      data_(rows * cols * channels, fill) {}

Image::Image(std::size_t rows, std::size_t cols, std::size_t channels,
             std::vector<std::uint8_t> data)
    : rows_(rows), cols_(cols), channels_(channels), data_(std::move(data)) {
  if (data_.size() != rows * cols * channels) {
    throw Error(ErrorCode::ShapeMismatch,
                "image buffer holds " + std::to_string(data_.size()) +
                    " bytes, expected " +
                    std::to_string(rows * cols * channels));
  }
}

Image Image::crop(std::size_t row0, std::size_t col0, std::size_t rows,
                  std::size_t cols) const {
  if (row0 + rows > rows_ || col0 + cols > cols_) {
    throw Error(ErrorCode::ShapeMismatch, "crop region outside image");
  }
  Image out(rows, cols, channels_);
  const std::size_t stride = cols * channels_;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto src = data_.begin() +
                     static_cast<std::ptrdiff_t>(((row0 + r) * cols_ + col0) *
                                                 channels_);
    std::copy(src, src + static_cast<std::ptrdiff_t>(stride),
              out.data_.begin() + static_cast<std::ptrdiff_t>(r * stride));
  }
  return out;
}

void Image::paste(const Image& src, std::size_t row0, std::size_t col0) {
  if (src.channels_ != channels_ || row0 + src.rows_ > rows_ ||
      col0 + src.cols_ > cols_) {
    throw Error(ErrorCode::ShapeMismatch, "paste region outside image");
  }
  const std::size_t stride = src.cols_ * channels_;
  for (std::size_t r = 0; r < src.rows_; ++r) {
    const auto from =
        src.data_.begin() + static_cast<std::ptrdiff_t>(r * stride);
    std::copy(from, from + static_cast<std::ptrdiff_t>(stride),
              data_.begin() + static_cast<std::ptrdiff_t>(
                                  ((row0 + r) * cols_ + col0) * channels_));
  }
}

Image Image::channel(std::size_t ch) const {
  if (ch >= channels_) {
    throw Error(ErrorCode::ShapeMismatch, "channel index out of range");
  }
  Image out(rows_, cols_, 1);
  for (std::size_t i = 0; i < rows_ * cols_; ++i) {
    out.data_[i] = data_[i * channels_ + ch];
  }
  return out;
}

std::string_view to_string(SubImageKind kind) noexcept {
  switch (kind) {
    case SubImageKind::SlopeDynamics: return "slope_dynamics";
    case SubImageKind::SpikePatterns: return "spike_patterns";
    case SubImageKind::GafPolar: return "gaf_polar";
    case SubImageKind::Cymatic: return "cymatic";
  }
  return "unknown";
}

}  // namespace propimg
