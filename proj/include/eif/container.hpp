#pragma once

#include "eif/dictionary.hpp"
#include "eif/error.hpp"
#include "eif/folding.hpp"
#include "eif/pursuit.hpp"

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace eif {

// .eif container, version 1. All integers little-endian, reals IEEE-754
// binary64.
//
//   off  size  field
//    0    4    magic "EIF1"
//    4    2    version (1)
//    6    2    flags (bit 0 reserved for compressed sidecars; must be 0)
//    8    4    width
//   12    4    height
//   16    1    bitdepth (8 or 16)
//   17    1    dirac atoms present (0 = block DCT coder, 1 = RDC-DB)
//   18    2    reserved (0)
//   20    4    n (block side)
//   24    4    m (cosine atoms per axis)
//   28    4    redundancy (m / n)
//   32    4    Q (block count)
//   36    4    H (host count)
//   40    1    stop rule mode; 41..43 reserved (0)
//   44    4    stop rule max_atoms
//   48    8    stop rule target_mse
//   56    8    stop rule residual_tol
//   64    8    seed_root
//   72         H x { u64 public seed, f64 offset, f64 scale }
//              Q x u32 K_q
//              sum(K_q) x u32 flat atom index (1-based)
//              H x n^2 samples, u8 (8-bit) or u16 (16-bit), row-major per block
inline constexpr std::uint16_t container_version = 1;
inline constexpr std::size_t container_header_size = 72;
inline constexpr std::size_t max_container_block_side = 1024;
inline constexpr std::size_t max_container_redundancy = 64;

namespace detail {

class byte_writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes_;
};

class byte_reader {
 public:
  explicit byte_reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void need(std::size_t count, const char* what) const {
    if (count > remaining()) fail(errc::truncated, std::string("container ends inside ") + what);
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::span<const std::uint8_t> take(std::size_t count) {
    need(count, "section");
    auto s = bytes_.subspan(pos_, count);
    pos_ += count;
    return s;
  }

 private:
  std::uint64_t get(int width) {
    need(static_cast<std::size_t>(width), "field");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

inline void check_consistent(const folded_image& f) {
  try {
    f.dict.validate();
    f.stop.validate();
  } catch (const error& e) {
    fail(errc::malformed, e.what());
  }
  if (f.bitdepth != 8 && f.bitdepth != 16) fail(errc::malformed, "bit depth must be 8 or 16");
  if (f.dict.n > max_container_block_side || f.dict.redundancy() > max_container_redundancy)
    fail(errc::malformed, "dictionary size outside container limits");
  if (f.width == 0 || f.height == 0 || f.width % f.dict.n != 0 || f.height % f.dict.n != 0)
    fail(errc::malformed, "image dimensions not divisible by block side");
  const auto expected_q = static_cast<unsigned __int128>(f.width / f.dict.n) * (f.height / f.dict.n);
  if (expected_q != f.q_total()) fail(errc::length_mismatch, "block count does not match image dimensions");
  if (f.host_count > f.q_total()) fail(errc::malformed, "more hosts than blocks");
  if (f.seeds.size() != f.host_count || f.quant.size() != f.host_count)
    fail(errc::length_mismatch, "per-host records do not match host count");
  const std::size_t dim = f.dict.n * f.dict.n;
  std::size_t total = 0;
  for (std::uint32_t k : f.atom_counts) {
    if (k > dim) fail(errc::malformed, "block declares more atoms than pixels");
    total += k;
  }
  if (total != f.atom_indices.size()) fail(errc::length_mismatch, "sidecar index count does not match K_q totals");
  const std::size_t atoms = f.dict.atom_count();
  for (std::uint32_t idx : f.atom_indices)
    if (idx < 1 || idx > atoms) fail(errc::out_of_range, "atom index " + std::to_string(idx) + " outside dictionary");
  for (const quant_params& qp : f.quant)
    if (!std::isfinite(qp.offset) || !std::isfinite(qp.scale) || !(qp.scale > 0.0))
      fail(errc::malformed, "invalid quantization parameters");
  if (f.host_pixels.size() != f.host_count * dim) fail(errc::length_mismatch, "host payload size");
  const std::uint32_t top = (1u << f.bitdepth) - 1u;
  for (std::uint16_t s : f.host_pixels)
    if (s > top) fail(errc::out_of_range, "host sample exceeds bit depth");
}

}  // namespace detail

inline std::vector<std::uint8_t> write_container(const folded_image& f) {
  detail::check_consistent(f);
  detail::byte_writer w;
  w.raw("EIF1");
  w.u16(container_version);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(f.width));
  w.u32(static_cast<std::uint32_t>(f.height));
  w.u8(static_cast<std::uint8_t>(f.bitdepth));
  w.u8(f.dict.with_dirac ? 1 : 0);
  w.u16(0);
  w.u32(static_cast<std::uint32_t>(f.dict.n));
  w.u32(static_cast<std::uint32_t>(f.dict.m));
  w.u32(static_cast<std::uint32_t>(f.dict.redundancy()));
  w.u32(static_cast<std::uint32_t>(f.q_total()));
  w.u32(static_cast<std::uint32_t>(f.host_count));
  w.u8(static_cast<std::uint8_t>(f.stop.mode));
  w.u8(0);
  w.u16(0);
  w.u32(f.stop.max_atoms);
  w.f64(f.stop.target_mse);
  w.f64(f.stop.residual_tol);
  w.u64(f.seed_root);
  for (std::size_t h = 0; h < f.host_count; ++h) {
    w.u64(f.seeds[h]);
    w.f64(f.quant[h].offset);
    w.f64(f.quant[h].scale);
  }
  for (std::uint32_t k : f.atom_counts) w.u32(k);
  for (std::uint32_t idx : f.atom_indices) w.u32(idx);
  for (std::uint16_t s : f.host_pixels) {
    if (f.bitdepth == 8) {
      w.u8(static_cast<std::uint8_t>(s));
    } else {
      w.u16(s);
    }
  }
  return w.take();
}

inline folded_image read_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "EIF1", 4) != 0) fail(errc::bad_magic, "not an EIF1 container");
  detail::byte_reader r(bytes.subspan(4));
  r.need(container_header_size - 4, "header");
  const std::uint16_t version = r.u16();
  if (version != container_version) fail(errc::version_mismatch, "container version " + std::to_string(version));
  const std::uint16_t flags = r.u16();
  if (flags != 0) fail(errc::unsupported_format, "container flags " + std::to_string(flags));

  folded_image f;
  f.width = r.u32();
  f.height = r.u32();
  f.bitdepth = r.u8();
  const std::uint8_t dirac = r.u8();
  const std::uint16_t reserved = r.u16();
  f.dict.n = r.u32();
  f.dict.m = r.u32();
  const std::uint32_t redundancy = r.u32();
  const std::uint32_t q_total = r.u32();
  f.host_count = r.u32();
  const std::uint8_t mode = r.u8();
  const std::uint8_t pad8 = r.u8();
  const std::uint16_t pad16 = r.u16();
  f.stop.max_atoms = r.u32();
  f.stop.target_mse = r.f64();
  f.stop.residual_tol = r.f64();
  f.seed_root = r.u64();

  if (dirac > 1 || reserved != 0 || pad8 != 0 || pad16 != 0) fail(errc::malformed, "reserved header fields not zero");
  f.dict.with_dirac = dirac == 1;
  if (f.dict.n == 0 || f.dict.n > max_container_block_side || redundancy == 0 || redundancy > max_container_redundancy ||
      f.dict.m != static_cast<std::size_t>(redundancy) * f.dict.n)
    fail(errc::malformed, "inconsistent dictionary parameters");
  if (mode > static_cast<std::uint8_t>(stop_rule::kind::residual_tol)) fail(errc::malformed, "unknown stop rule");
  f.stop.mode = static_cast<stop_rule::kind>(mode);
  if (f.host_count > q_total) fail(errc::malformed, "more hosts than blocks");

  r.need(f.host_count * 24, "host records");
  f.seeds.reserve(f.host_count);
  f.quant.reserve(f.host_count);
  for (std::size_t h = 0; h < f.host_count; ++h) {
    f.seeds.push_back(r.u64());
    const double offset = r.f64();
    const double scale = r.f64();
    f.quant.push_back({offset, scale});
  }

  r.need(static_cast<std::size_t>(q_total) * 4, "atom counts");
  f.atom_counts.reserve(q_total);
  std::size_t total = 0;
  const std::size_t dim = f.dict.n * f.dict.n;
  for (std::uint32_t q = 0; q < q_total; ++q) {
    const std::uint32_t k = r.u32();
    if (k > dim) fail(errc::malformed, "block declares more atoms than pixels");
    f.atom_counts.push_back(k);
    total += k;
  }
  if (total > r.remaining() / 4) fail(errc::length_mismatch, "sidecar declares more indices than the section holds");
  f.atom_indices.reserve(total);
  for (std::size_t i = 0; i < total; ++i) f.atom_indices.push_back(r.u32());

  if (f.bitdepth != 8 && f.bitdepth != 16) fail(errc::malformed, "bit depth must be 8 or 16");
  const std::size_t bytes_per_sample = f.bitdepth / 8;
  const std::size_t samples = f.host_count * dim;
  if (samples > r.remaining() / bytes_per_sample) fail(errc::truncated, "host payload shorter than declared");
  if (samples * bytes_per_sample != r.remaining()) fail(errc::length_mismatch, "trailing bytes after host payload");
  f.host_pixels.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) f.host_pixels.push_back(bytes_per_sample == 1 ? r.u8() : r.u16());

  detail::check_consistent(f);
  return f;
}

}  // namespace eif
