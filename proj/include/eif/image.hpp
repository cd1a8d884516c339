#pragma once

#include "eif/error.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace eif {

/// Grayscale image, row-major samples, 8 or 16 bits per sample.
struct gray_image {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned bitdepth = 8;
  std::vector<std::uint16_t> samples;

  std::uint32_t max_value() const noexcept { return (1u << bitdepth) - 1u; }
  std::uint16_t at(std::size_t row, std::size_t col) const { return samples[row * width + col]; }
  std::uint16_t& at(std::size_t row, std::size_t col) { return samples[row * width + col]; }

  void validate() const {
    if (bitdepth != 8 && bitdepth != 16) fail(errc::invalid_argument, "bit depth must be 8 or 16");
    if (samples.size() != width * height) fail(errc::length_mismatch, "sample count does not match dimensions");
    for (std::uint16_t s : samples)
      if (s > max_value()) fail(errc::out_of_range, "sample exceeds bit depth");
  }

  friend bool operator==(const gray_image&, const gray_image&) = default;
};

namespace detail {

class pnm_header_reader {
 public:
  explicit pnm_header_reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) fail(errc::truncated, std::string("PGM header ends before ") + what);
    if (!is_digit(bytes_[pos_])) fail(errc::malformed, std::string("PGM ") + what + " is not a decimal number");
    std::size_t value = 0;
    while (pos_ < bytes_.size() && is_digit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > (1u << 24)) fail(errc::malformed, std::string("PGM ") + what + " is implausibly large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size()) fail(errc::truncated, "PGM header ends before raster");
    if (!is_space(bytes_[pos_])) fail(errc::malformed, "PGM maxval not followed by whitespace");
    ++pos_;
  }

  std::size_t position() const noexcept { return pos_; }

 private:
  static bool is_digit(std::uint8_t c) { return c >= '0' && c <= '9'; }
  static bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace detail

/// Binary (P5) PGM, maxval 255 or 65535. 16-bit samples are big-endian.
inline gray_image read_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') fail(errc::malformed, "not a PNM file");
  if (bytes[1] != '5') {
    if (bytes[1] >= '1' && bytes[1] <= '7')
      fail(errc::unsupported_format, std::string("PNM variant P") + static_cast<char>(bytes[1]) +
                                         " is not supported; only binary P5 grayscale");
    fail(errc::malformed, "not a PNM file");
  }
  detail::pnm_header_reader header(bytes);
  gray_image img;
  img.width = header.number("width");
  img.height = header.number("height");
  const std::size_t maxval = header.number("maxval");
  header.single_space();
  if (img.width == 0 || img.height == 0) fail(errc::malformed, "PGM has zero width or height");
  if (maxval == 255) {
    img.bitdepth = 8;
  } else if (maxval == 65535) {
    img.bitdepth = 16;
  } else {
    fail(errc::unsupported_format, "PGM maxval " + std::to_string(maxval) + " (supported: 255, 65535)");
  }
  const std::size_t bytes_per_sample = img.bitdepth / 8;
  const std::size_t count = img.width * img.height;
  const std::size_t remaining = bytes.size() - header.position();
  if (count > remaining / bytes_per_sample) fail(errc::truncated, "PGM raster shorter than declared");
  if (count * bytes_per_sample != remaining) fail(errc::length_mismatch, "trailing bytes after PGM raster");
  img.samples.resize(count);
  const std::uint8_t* p = bytes.data() + header.position();
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] = bytes_per_sample == 1 ? p[i] : static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]);
  }
  return img;
}

inline std::vector<std::uint8_t> write_pgm(const gray_image& img) {
  img.validate();
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n" + std::to_string(img.max_value()) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.samples.size() * (img.bitdepth / 8));
  for (std::uint16_t s : img.samples) {
    if (img.bitdepth == 16) out.push_back(static_cast<std::uint8_t>(s >> 8));
    out.push_back(static_cast<std::uint8_t>(s & 0xFF));
  }
  return out;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(errc::io, "cannot read " + path.string());
  return bytes;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(errc::io, "cannot write " + path.string());
}

inline gray_image load_pgm(const std::filesystem::path& path) { return read_pgm(read_file(path)); }
inline void save_pgm(const std::filesystem::path& path, const gray_image& img) { write_file(path, write_pgm(img)); }

}  // namespace eif
