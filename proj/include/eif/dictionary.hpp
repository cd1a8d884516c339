#pragma once

#include "eif/block.hpp"
#include "eif/cosine_transform.hpp"
#include "eif/error.hpp"

#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>

namespace eif {

// Shape of the joint cosine + Dirac dictionary D = D_ab (x) D_ab.
//
// n is the block side, m the number of 1-D cosine atoms. m == n gives the
// orthonormal DCT basis; m = r*n with r even gives a redundant cosine
// dictionary of redundancy r. with_dirac = false drops the Dirac atoms, which
// turns the m == n configuration into the plain block DCT coder.
struct dict_params {
  std::size_t n = 8;
  std::size_t m = 16;
  bool with_dirac = true;

  std::size_t redundancy() const noexcept { return n == 0 ? 0 : m / n; }

  std::size_t atom_count() const noexcept {
    const std::size_t side = with_dirac ? m + n : m;
    return side * side;
  }

  void validate() const {
    if (n == 0) fail(errc::invalid_argument, "block side must be positive");
    if (m < n) fail(errc::invalid_argument, "cosine count m must be at least the block side n");
    if (m % n != 0) fail(errc::invalid_argument, "cosine count m=" + std::to_string(m) + " is not a multiple of n=" + std::to_string(n));
    const std::size_t r = m / n;
    if (r != 1 && r % 2 != 0)
      fail(errc::invalid_argument, "redundancy must be 1 or an even integer, got " + std::to_string(r));
  }

  friend bool operator==(const dict_params&, const dict_params&) = default;
};

inline dict_params rdcdb_params(std::size_t n, std::size_t redundancy = 2) {
  dict_params p{n, n * redundancy, true};
  p.validate();
  return p;
}

inline dict_params dct_params(std::size_t n) {
  dict_params p{n, n, false};
  p.validate();
  return p;
}

enum class segment : std::uint8_t { cos_cos, cos_dirac, dirac_cos, dirac_dirac };

/// One 2-D atom. `flat` runs over 1..J in the order cos(x)cos, cos(x)e, e(x)cos,
/// e(x)e; within a segment (i, j) are 1-based and i is the slow coordinate.
struct atom_index {
  std::uint32_t flat = 0;
  segment seg = segment::cos_cos;
  std::uint32_t i = 0;
  std::uint32_t j = 0;

  friend bool operator==(const atom_index&, const atom_index&) = default;
};

class dictionary {
 public:
  explicit dictionary(const dict_params& params) : params_(params), transform_((params.validate(), params.m)) {
    const auto n = static_cast<Eigen::Index>(params_.n);
    const auto m = static_cast<Eigen::Index>(params_.m);
    cos_table_.resize(n, m);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i)
        cos_table_(j, i) = std::cos(std::numbers::pi * static_cast<double>((2 * j + 1) * i) /
                                    (2.0 * static_cast<double>(m)));
    norms_.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) norms_(i) = 1.0 / cos_table_.col(i).norm();
    atoms_ = cos_table_ * norms_.asDiagonal();
  }

  const dict_params& params() const noexcept { return params_; }
  std::size_t n() const noexcept { return params_.n; }
  std::size_t m() const noexcept { return params_.m; }
  bool with_dirac() const noexcept { return params_.with_dirac; }
  std::size_t atom_count() const noexcept { return params_.atom_count(); }

  /// psi(j, i) = cos(pi (2j+1) i / (2m)), 0-based; n x m.
  const Eigen::MatrixXd& cos_table() const noexcept { return cos_table_; }
  /// p_i: reciprocal Euclidean norm of column i of cos_table().
  const Eigen::VectorXd& norms() const noexcept { return norms_; }
  /// Unit-norm 1-D cosine atoms p_i psi(., i) as columns.
  const Eigen::MatrixXd& cosine_atoms() const noexcept { return atoms_; }
  const cosine_transform& transform() const noexcept { return transform_; }

  atom_index index(std::size_t flat) const {
    if (flat < 1 || flat > atom_count())
      fail(errc::out_of_range, "atom " + std::to_string(flat) + " not in 1.." + std::to_string(atom_count()));
    const std::size_t m = params_.m, n = params_.n;
    std::size_t k = flat - 1;
    auto make = [&](segment seg, std::size_t cols) {
      return atom_index{static_cast<std::uint32_t>(flat), seg, static_cast<std::uint32_t>(k / cols + 1),
                        static_cast<std::uint32_t>(k % cols + 1)};
    };
    if (k < m * m) return make(segment::cos_cos, m);
    k -= m * m;
    if (k < m * n) return make(segment::cos_dirac, n);
    k -= m * n;
    if (k < n * m) return make(segment::dirac_cos, m);
    k -= n * m;
    return make(segment::dirac_dirac, n);
  }

  atom_index index(segment seg, std::size_t i, std::size_t j) const {
    const std::size_t m = params_.m, n = params_.n;
    if (!params_.with_dirac && seg != segment::cos_cos)
      fail(errc::out_of_range, "dictionary has no Dirac atoms");
    const auto [rows, cols, base] = [&]() -> std::tuple<std::size_t, std::size_t, std::size_t> {
      switch (seg) {
        case segment::cos_cos: return {m, m, 0};
        case segment::cos_dirac: return {m, n, m * m};
        case segment::dirac_cos: return {n, m, m * m + m * n};
        case segment::dirac_dirac: break;
      }
      return {n, n, m * m + 2 * m * n};
    }();
    if (i < 1 || i > rows || j < 1 || j > cols)
      fail(errc::out_of_range, "atom coordinates (" + std::to_string(i) + "," + std::to_string(j) + ") outside segment");
    const std::size_t flat = base + (i - 1) * cols + j;
    return atom_index{static_cast<std::uint32_t>(flat), seg, static_cast<std::uint32_t>(i),
                      static_cast<std::uint32_t>(j)};
  }

  /// The n x n matrix of an atom; every atom has unit Frobenius norm.
  Block atom_pixels(const atom_index& idx) const {
    const auto n = static_cast<Eigen::Index>(params_.n);
    const Eigen::Index i = idx.i - 1, j = idx.j - 1;
    Block out = Block::Zero(n, n);
    switch (idx.seg) {
      case segment::cos_cos: out.noalias() = atoms_.col(i) * atoms_.col(j).transpose(); break;
      case segment::cos_dirac: out.col(j) = atoms_.col(i); break;
      case segment::dirac_cos: out.row(i) = atoms_.col(j).transpose(); break;
      case segment::dirac_dirac: out(i, j) = 1.0; break;
    }
    return out;
  }

  Block atom_pixels(std::size_t flat) const { return atom_pixels(index(flat)); }

 private:
  dict_params params_;
  cosine_transform transform_;
  Eigen::MatrixXd cos_table_;
  Eigen::VectorXd norms_;
  Eigen::MatrixXd atoms_;
};

inline dictionary build_dictionary(const dict_params& params) { return dictionary(params); }

}  // namespace eif
