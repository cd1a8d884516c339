#pragma once

#include "eif/block.hpp"
#include "eif/error.hpp"
#include "eif/pursuit.hpp"
#include "eif/rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace eif {

/// Public seed (one per host block) and secret key (one per image).
struct key_material {
  std::uint64_t public_seed = 0;
  std::uint64_t secret_key = 0;
};

/// Deterministic stream of n x n matrices with entries uniform in [-1, 1),
/// filled row-major from a SplitMix64 generator.
class raw_matrix_stream {
 public:
  raw_matrix_stream(std::uint64_t seed, std::size_t side) : rng_(seed), side_(side) {}

  Block next() {
    const auto n = static_cast<Eigen::Index>(side_);
    Block y(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index r = 0; r < n; ++r) y(s, r) = rng_.next_symmetric();
    return y;
  }

  std::size_t side() const noexcept { return side_; }

 private:
  splitmix64 rng_;
  std::size_t side_;
};

inline std::vector<Block> gen_raw_matrices(std::uint64_t seed, std::size_t count, std::size_t side) {
  if (count > side * side) fail(errc::invalid_argument, "more raw matrices than the block dimension");
  raw_matrix_stream stream(seed, side);
  std::vector<Block> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(stream.next());
  return out;
}

/// Keyed signed permutation: u_i = sign_i * o_{perm_i}.
struct signed_permutation {
  std::vector<std::size_t> perm;
  std::vector<int> sign;

  /// Fisher-Yates driven by SplitMix64(key), then one sign bit per slot.
  static signed_permutation from_key(std::uint64_t key, std::size_t count) {
    splitmix64 rng(key);
    signed_permutation p;
    p.perm.resize(count);
    std::iota(p.perm.begin(), p.perm.end(), std::size_t{0});
    for (std::size_t i = count; i > 1; --i) std::swap(p.perm[i - 1], p.perm[rng.next_below(i)]);
    p.sign.resize(count);
    for (std::size_t i = 0; i < count; ++i) p.sign[i] = (rng.next() >> 63) != 0 ? -1 : 1;
    return p;
  }
};

/// Orthonormal basis u_1..u_L of the orthogonal complement of a host span,
/// L = n^2 - K.
struct embedding_basis {
  std::vector<Block> vectors;
  std::size_t host_rank = 0;
  std::size_t side = 0;

  std::size_t capacity() const noexcept { return vectors.size(); }
};

/// Builds the keyed null-space basis of `host`.
///
/// Each raw matrix has its projection onto the host span removed, then is
/// orthogonalized against the directions accepted so far and normalized.
/// A raw matrix that collapses (norm below 1e-10 of its original) is
/// replaced by the next draw from `refill`; at most 3L draws are made in
/// total. The orthonormal set is finally reordered and sign-flipped by the
/// signed permutation derived from `key`.
inline embedding_basis build_embedding_basis(std::span<const Block> raws, const atom_span& host, std::uint64_t key,
                                             raw_matrix_stream* refill = nullptr) {
  const std::size_t n = host.side();
  const std::size_t capacity = n * n - host.size();
  if (raws.size() != capacity)
    fail(errc::invalid_argument, "expected " + std::to_string(capacity) + " raw matrices, got " + std::to_string(raws.size()));

  std::vector<Block> accepted;
  accepted.reserve(capacity);
  std::size_t draws = 0;
  std::size_t next_raw = 0;
  const std::size_t max_draws = 3 * capacity;

  while (accepted.size() < capacity) {
    Block y;
    if (next_raw < raws.size()) {
      y = raws[next_raw++];
    } else if (refill != nullptr && draws < max_draws) {
      y = refill->next();
    } else {
      fail(errc::basis_exhausted, "found " + std::to_string(accepted.size()) + " of " + std::to_string(capacity) +
                                      " independent null-space directions");
    }
    ++draws;
    if (static_cast<std::size_t>(y.rows()) != n || static_cast<std::size_t>(y.cols()) != n)
      fail(errc::shape_mismatch, "raw matrix side does not match host");
    const double original = y.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const Block& q : host.ortho_basis()) y -= frobenius_dot(q, y) * q;
      for (const Block& o : accepted) y -= frobenius_dot(o, y) * o;
    }
    const double norm = y.norm();
    if (norm < 1e-10 * original || norm == 0.0) continue;
    accepted.push_back(y / norm);
  }

  const auto permutation = signed_permutation::from_key(key, capacity);
  embedding_basis basis;
  basis.host_rank = host.size();
  basis.side = n;
  basis.vectors.reserve(capacity);
  for (std::size_t i = 0; i < capacity; ++i)
    basis.vectors.push_back(static_cast<double>(permutation.sign[i]) * accepted[permutation.perm[i]]);
  return basis;
}

/// Generates the L raw matrices from the public seed and builds the basis,
/// drawing replacements from the same stream when needed.
inline embedding_basis make_embedding_basis(const key_material& keys, const atom_span& host) {
  const std::size_t n = host.side();
  const std::size_t capacity = n * n - host.size();
  raw_matrix_stream stream(keys.public_seed, n);
  std::vector<Block> raws;
  raws.reserve(capacity);
  for (std::size_t i = 0; i < capacity; ++i) raws.push_back(stream.next());
  return build_embedding_basis(raws, host, keys.secret_key, &stream);
}

/// G = host_recon + sum_i h_i u_i. Payloads shorter than L are zero-extended.
inline Block embed(const Block& host_recon, const embedding_basis& basis, std::span<const double> payload) {
  if (payload.size() > basis.capacity())
    fail(errc::capacity, "payload of " + std::to_string(payload.size()) + " exceeds capacity " +
                             std::to_string(basis.capacity()));
  Block g = host_recon;
  for (std::size_t i = 0; i < payload.size(); ++i) g += payload[i] * basis.vectors[i];
  return g;
}

/// h_i = <u_i, F>_F with F = G - P G, for all L basis vectors.
inline std::vector<double> retrieve(const Block& g, const embedding_basis& basis, const atom_span& host) {
  const Block f = g - host.project(g);
  std::vector<double> h;
  h.reserve(basis.capacity());
  for (const Block& u : basis.vectors) h.push_back(frobenius_dot(u, f));
  return h;
}

}  // namespace eif
