#pragma once

#include "eif/block.hpp"
#include "eif/dictionary.hpp"
#include "eif/error.hpp"
#include "eif/image.hpp"
#include "eif/nullspace.hpp"
#include "eif/parallel.hpp"
#include "eif/pursuit.hpp"
#include "eif/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eif {

/// Raster partition of an image into square blocks.
struct block_grid {
  std::size_t block_rows = 0;
  std::size_t block_cols = 0;
  std::size_t side = 0;

  std::size_t count() const noexcept { return block_rows * block_cols; }
  std::size_t width() const noexcept { return block_cols * side; }
  std::size_t height() const noexcept { return block_rows * side; }
  /// Top-left pixel (row, col) of block q.
  std::pair<std::size_t, std::size_t> origin(std::size_t q) const noexcept {
    return {(q / block_cols) * side, (q % block_cols) * side};
  }

  static block_grid for_image(std::size_t width, std::size_t height, std::size_t side) {
    if (side == 0) fail(errc::invalid_argument, "block side must be positive");
    if (width == 0 || height == 0 || width % side != 0 || height % side != 0)
      fail(errc::invalid_argument, "image " + std::to_string(width) + "x" + std::to_string(height) +
                                       " is not divisible into " + std::to_string(side) + "x" + std::to_string(side) +
                                       " blocks");
    return block_grid{height / side, width / side, side};
  }
};

inline std::vector<Block> extract_blocks(const gray_image& img, const block_grid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.side);
  std::vector<Block> blocks;
  blocks.reserve(grid.count());
  for (std::size_t q = 0; q < grid.count(); ++q) {
    const auto [row0, col0] = grid.origin(q);
    Block b(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index r = 0; r < n; ++r)
        b(s, r) = img.at(row0 + static_cast<std::size_t>(s), col0 + static_cast<std::size_t>(r));
    blocks.push_back(std::move(b));
  }
  return blocks;
}

/// Row-major real raster assembled from blocks.
inline std::vector<double> assemble(std::span<const Block> blocks, const block_grid& grid) {
  std::vector<double> out(grid.width() * grid.height());
  const auto n = static_cast<Eigen::Index>(grid.side);
  for (std::size_t q = 0; q < blocks.size(); ++q) {
    const auto [row0, col0] = grid.origin(q);
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index r = 0; r < n; ++r)
        out[(row0 + static_cast<std::size_t>(s)) * grid.width() + col0 + static_cast<std::size_t>(r)] = blocks[q](s, r);
  }
  return out;
}

inline gray_image round_to_image(std::span<const double> raster, std::size_t width, std::size_t height, unsigned bitdepth) {
  gray_image img{width, height, bitdepth, std::vector<std::uint16_t>(raster.size())};
  const double top = static_cast<double>(img.max_value());
  for (std::size_t i = 0; i < raster.size(); ++i)
    img.samples[i] = static_cast<std::uint16_t>(std::clamp(std::round(raster[i]), 0.0, top));
  return img;
}

/// A run of consecutive coefficients of one non-host block, stored in
/// consecutive slots of one host basis.
struct payload_segment {
  std::size_t block = 0;        // raster index of the non-host block
  std::size_t coeff_begin = 0;  // position within that block's coefficients
  std::size_t count = 0;
  std::size_t host = 0;         // raster index of the host block
  std::size_t slot = 0;         // first basis slot (0-based) in the host
};

struct fold_plan {
  std::size_t q_total = 0;
  std::size_t host_count = 0;
  std::size_t block_side = 0;
  std::vector<std::size_t> block_order;      // raster order; the first host_count are hosts
  std::vector<std::size_t> capacities;       // L_q = n^2 - K_q per host
  std::vector<std::size_t> payload_lengths;  // K_q per non-host block
  std::vector<payload_segment> assignment;

  std::size_t payload_total() const noexcept {
    std::size_t total = 0;
    for (std::size_t k : payload_lengths) total += k;
    return total;
  }
};

/// Chooses the host count H and lays out the payload.
///
/// Hosts are the first H raster blocks. H is the least value with
///   sum_{q<H} (n^2 - K_q) >= sum_{q>=H} K_q,
/// searched from ceil(sum K / n^2) = ceil(Q / SR). Packing walks non-host
/// blocks in raster order, each block's coefficients in selection order,
/// filling host slots 1..L_q before moving to the next host.
///
/// When every block must stay a host (H = Q with something to store) the
/// image cannot be folded; that is an error unless `allow_unfolded`.
inline fold_plan plan_fold(std::span<const std::size_t> atom_counts, std::size_t side, bool allow_unfolded = false) {
  const std::size_t q_total = atom_counts.size();
  const std::size_t dim = side * side;
  std::size_t total = 0;
  for (std::size_t k : atom_counts) {
    if (k > dim) fail(errc::invalid_argument, "block has more atoms than pixels");
    total += k;
  }

  std::vector<std::size_t> prefix_capacity(q_total + 1, 0), prefix_atoms(q_total + 1, 0);
  for (std::size_t q = 0; q < q_total; ++q) {
    prefix_capacity[q + 1] = prefix_capacity[q] + (dim - atom_counts[q]);
    prefix_atoms[q + 1] = prefix_atoms[q] + atom_counts[q];
  }
  auto feasible = [&](std::size_t h) { return prefix_capacity[h] >= total - prefix_atoms[h]; };

  std::size_t hosts = dim == 0 ? 0 : std::min(q_total, (total + dim - 1) / dim);
  while (hosts > 0 && feasible(hosts - 1)) --hosts;
  while (hosts < q_total && !feasible(hosts)) ++hosts;

  if (hosts == q_total && total > 0 && !allow_unfolded)
    fail(errc::not_foldable, "all " + std::to_string(q_total) +
                                 " blocks are needed as hosts; raise sparsity (lower the PSNR target)");

  fold_plan plan;
  plan.q_total = q_total;
  plan.host_count = hosts;
  plan.block_side = side;
  plan.block_order.resize(q_total);
  for (std::size_t q = 0; q < q_total; ++q) plan.block_order[q] = q;
  for (std::size_t q = 0; q < hosts; ++q) plan.capacities.push_back(dim - atom_counts[q]);
  for (std::size_t q = hosts; q < q_total; ++q) plan.payload_lengths.push_back(atom_counts[q]);

  std::size_t host = 0, slot = 0;
  for (std::size_t q = hosts; q < q_total; ++q) {
    std::size_t done = 0;
    while (done < atom_counts[q]) {
      while (host < hosts && slot == plan.capacities[host]) {
        ++host;
        slot = 0;
      }
      if (host == hosts) fail(errc::capacity, "host capacity exhausted while packing");
      const std::size_t run = std::min(atom_counts[q] - done, plan.capacities[host] - slot);
      plan.assignment.push_back(payload_segment{q, done, run, host, slot});
      done += run;
      slot += run;
    }
  }
  return plan;
}

inline fold_plan plan_fold(std::span<const sparse_rep> reps, bool allow_unfolded = false) {
  if (reps.empty()) return plan_fold(std::span<const std::size_t>{}, 0, allow_unfolded);
  std::vector<std::size_t> counts;
  counts.reserve(reps.size());
  for (const sparse_rep& r : reps) counts.push_back(r.size());
  return plan_fold(counts, reps.front().block_side(), allow_unfolded);
}

struct quantized_block {
  std::vector<std::uint16_t> samples;  // row-major
  double offset = 0.0;
  double scale = 1.0;
};

/// Affine quantization to the full integer range of `bitdepth`:
/// offset = min, scale = (max - min) / (2^bitdepth - 1), or 1 for a constant block.
inline quantized_block quantize_host(const Block& g, unsigned bitdepth) {
  const double top = std::ldexp(1.0, static_cast<int>(bitdepth)) - 1.0;
  quantized_block out;
  out.offset = g.minCoeff();
  const double range = g.maxCoeff() - out.offset;
  out.scale = range > 0.0 ? range / top : 1.0;
  out.samples.reserve(static_cast<std::size_t>(g.size()));
  for (Eigen::Index s = 0; s < g.rows(); ++s)
    for (Eigen::Index r = 0; r < g.cols(); ++r)
      out.samples.push_back(
          static_cast<std::uint16_t>(std::clamp(std::round((g(s, r) - out.offset) / out.scale), 0.0, top)));
  return out;
}

inline Block dequantize(std::span<const std::uint16_t> samples, std::size_t side, double offset, double scale) {
  const auto n = static_cast<Eigen::Index>(side);
  if (samples.size() != side * side) fail(errc::length_mismatch, "host block sample count");
  Block g(n, n);
  for (Eigen::Index s = 0; s < n; ++s)
    for (Eigen::Index r = 0; r < n; ++r) g(s, r) = offset + scale * samples[static_cast<std::size_t>(s * n + r)];
  return g;
}

struct fold_options {
  bool allow_unfolded = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Real-valued result of folding, before quantization.
struct folded_field {
  block_grid grid;
  fold_plan plan;
  std::vector<sparse_rep> reps;         // all Q blocks
  std::vector<Block> approximations;    // I_q^{K_q}, all Q blocks
  std::vector<Block> hosts;             // G_q = I_q^{K_q} + F_q, first H blocks
  std::vector<std::uint64_t> seeds;     // public seed per host
};

/// Coefficient stream of the non-host blocks, in packing order.
inline std::vector<double> payload_stream(const fold_plan& plan, std::span<const sparse_rep> reps) {
  std::vector<double> stream;
  stream.reserve(plan.payload_total());
  for (std::size_t q = plan.host_count; q < plan.q_total; ++q)
    stream.insert(stream.end(), reps[q].coeffs.begin(), reps[q].coeffs.end());
  return stream;
}

inline folded_field fold_real(const gray_image& image, const dictionary& dict, const stop_rule& stop,
                              std::uint64_t secret_key, std::uint64_t seed_root, const fold_options& options = {}) {
  image.validate();
  stop.validate();
  folded_field out;
  out.grid = block_grid::for_image(image.width, image.height, dict.n());
  const std::vector<Block> blocks = extract_blocks(image, out.grid);
  const std::size_t q_total = blocks.size();

  out.reps.resize(q_total);
  out.approximations.resize(q_total);
  detail::parallel_for(
      q_total,
      [&](std::size_t q) {
        out.reps[q] = omp_decompose(blocks[q], dict, stop);
        out.approximations[q] = reconstruct(out.reps[q], dict);
      },
      options.threads);

  out.plan = plan_fold(out.reps, options.allow_unfolded);
  const std::vector<double> stream = payload_stream(out.plan, out.reps);

  const std::size_t hosts = out.plan.host_count;
  out.seeds.resize(hosts);
  out.hosts.resize(hosts);
  std::vector<std::size_t> offsets(hosts + 1, 0);
  for (std::size_t h = 0; h < hosts; ++h) offsets[h + 1] = offsets[h] + out.plan.capacities[h];

  detail::parallel_for(
      hosts,
      [&](std::size_t h) {
        out.seeds[h] = derive_key(seed_root, h);
        const auto basis = make_embedding_basis({out.seeds[h], derive_key(secret_key, h)}, out.reps[h].span);
        const std::size_t begin = std::min(offsets[h], stream.size());
        const std::size_t end = std::min(offsets[h + 1], stream.size());
        out.hosts[h] = embed(out.approximations[h], basis, std::span(stream).subspan(begin, end - begin));
      },
      options.threads);
  return out;
}

/// Recovers all Q block approximations from real-valued host blocks.
///
/// Host q: I~ = P G, then the embedded numbers <u_i, G - I~>. Non-host
/// blocks are synthesized from the recovered coefficients and their atom
/// indices. A wrong key still recovers the hosts exactly but yields a
/// signed permutation of every host's payload.
inline std::vector<Block> unfold_blocks(const dictionary& dict, std::span<const std::uint32_t> atom_counts,
                                        std::span<const std::uint32_t> atom_indices, std::size_t host_count,
                                        std::span<const Block> hosts, std::span<const std::uint64_t> seeds,
                                        std::uint64_t secret_key, unsigned threads = 0) {
  const std::size_t q_total = atom_counts.size();
  const std::size_t n = dict.n();
  if (host_count > q_total || hosts.size() != host_count || seeds.size() != host_count)
    fail(errc::length_mismatch, "host block count inconsistent with sidecar");

  std::vector<std::size_t> first(q_total + 1, 0);
  for (std::size_t q = 0; q < q_total; ++q) {
    if (atom_counts[q] > n * n) fail(errc::length_mismatch, "block declares more atoms than pixels");
    first[q + 1] = first[q] + atom_counts[q];
  }
  if (first[q_total] != atom_indices.size()) fail(errc::length_mismatch, "sidecar index count does not match K_q totals");

  std::vector<std::vector<atom_index>> indices(q_total);
  for (std::size_t q = 0; q < q_total; ++q) {
    indices[q].reserve(atom_counts[q]);
    for (std::size_t k = first[q]; k < first[q + 1]; ++k) indices[q].push_back(dict.index(atom_indices[k]));
  }

  std::size_t capacity = 0, needed = 0;
  for (std::size_t q = 0; q < host_count; ++q) capacity += n * n - atom_counts[q];
  for (std::size_t q = host_count; q < q_total; ++q) needed += atom_counts[q];
  if (capacity < needed) fail(errc::capacity, "hosts cannot hold the declared payload");

  std::vector<Block> blocks(q_total);
  std::vector<std::vector<double>> payloads(host_count);
  detail::parallel_for(
      host_count,
      [&](std::size_t h) {
        if (static_cast<std::size_t>(hosts[h].rows()) != n || static_cast<std::size_t>(hosts[h].cols()) != n)
          fail(errc::shape_mismatch, "host block side");
        const atom_span span = atom_span::from_indices(dict, indices[h]);
        blocks[h] = span.project(hosts[h]);
        const auto basis = make_embedding_basis({seeds[h], derive_key(secret_key, h)}, span);
        payloads[h] = retrieve(hosts[h], basis, span);
      },
      threads);

  std::vector<double> stream;
  stream.reserve(capacity);
  for (const auto& p : payloads) stream.insert(stream.end(), p.begin(), p.end());

  std::vector<std::size_t> offset(q_total + 1, 0);
  for (std::size_t q = host_count; q < q_total; ++q) offset[q + 1] = offset[q] + atom_counts[q];
  detail::parallel_for(
      q_total - host_count,
      [&](std::size_t i) {
        const std::size_t q = host_count + i;
        blocks[q] = reconstruct(indices[q], std::span(stream).subspan(offset[q], atom_counts[q]), dict);
      },
      threads);
  return blocks;
}

struct quant_params {
  double offset = 0.0;
  double scale = 1.0;

  friend bool operator==(const quant_params&, const quant_params&) = default;
};

/// The stored form of a folded image: H quantized host blocks plus sidecar.
struct folded_image {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned bitdepth = 8;
  dict_params dict;
  stop_rule stop;
  std::uint64_t seed_root = 0;
  std::size_t host_count = 0;
  std::vector<std::uint64_t> seeds;          // per host
  std::vector<quant_params> quant;           // per host
  std::vector<std::uint32_t> atom_counts;    // K_q, all Q blocks
  std::vector<std::uint32_t> atom_indices;   // flat 1-based indices, block after block
  std::vector<std::uint16_t> host_pixels;    // H blocks, raster order, row-major within block

  std::size_t q_total() const noexcept { return atom_counts.size(); }
  std::size_t total_atoms() const noexcept { return atom_indices.size(); }

  friend bool operator==(const folded_image&, const folded_image&) = default;
};

inline folded_image fold(const gray_image& image, const dictionary& dict, const stop_rule& stop, std::uint64_t secret_key,
                         std::uint64_t seed_root, const fold_options& options = {}) {
  const folded_field field = fold_real(image, dict, stop, secret_key, seed_root, options);
  folded_image out;
  out.width = image.width;
  out.height = image.height;
  out.bitdepth = image.bitdepth;
  out.dict = dict.params();
  out.stop = stop;
  out.seed_root = seed_root;
  out.host_count = field.plan.host_count;
  out.seeds = field.seeds;
  for (const sparse_rep& rep : field.reps) {
    out.atom_counts.push_back(static_cast<std::uint32_t>(rep.size()));
    for (const atom_index& idx : rep.indices()) out.atom_indices.push_back(idx.flat);
  }
  for (const Block& g : field.hosts) {
    quantized_block qb = quantize_host(g, image.bitdepth);
    out.quant.push_back({qb.offset, qb.scale});
    out.host_pixels.insert(out.host_pixels.end(), qb.samples.begin(), qb.samples.end());
  }
  return out;
}

/// Real-valued block approximations recovered from a stored fold.
inline std::vector<Block> unfold_approximations(const folded_image& folded, const dictionary& dict,
                                                std::uint64_t secret_key, unsigned threads = 0) {
  if (!(folded.dict == dict.params())) fail(errc::dictionary_mismatch, "folded image was made with another dictionary");
  const block_grid grid = block_grid::for_image(folded.width, folded.height, dict.n());
  if (grid.count() != folded.q_total()) fail(errc::length_mismatch, "block count does not match image dimensions");
  const std::size_t n = dict.n();
  if (folded.quant.size() != folded.host_count || folded.host_pixels.size() != folded.host_count * n * n)
    fail(errc::length_mismatch, "host payload size");
  std::vector<Block> hosts;
  hosts.reserve(folded.host_count);
  for (std::size_t h = 0; h < folded.host_count; ++h)
    hosts.push_back(dequantize(std::span(folded.host_pixels).subspan(h * n * n, n * n), n, folded.quant[h].offset,
                               folded.quant[h].scale));
  return unfold_blocks(dict, folded.atom_counts, folded.atom_indices, folded.host_count, hosts, folded.seeds, secret_key,
                       threads);
}

inline gray_image unfold(const folded_image& folded, const dictionary& dict, std::uint64_t secret_key, unsigned threads = 0) {
  const std::vector<Block> blocks = unfold_approximations(folded, dict, secret_key, threads);
  const block_grid grid = block_grid::for_image(folded.width, folded.height, dict.n());
  return round_to_image(assemble(blocks, grid), folded.width, folded.height, folded.bitdepth);
}

}  // namespace eif
