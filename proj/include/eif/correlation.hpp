#pragma once

#include "eif/block.hpp"
#include "eif/dictionary.hpp"
#include "eif/error.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace eif {

/// Inner products of one residual with every atom, one plane per segment:
/// cc is m x m, cd is m x n, dc is n x m, dd is n x n. The Dirac planes are
/// empty for a cosine-only dictionary.
struct correlation_map {
  Eigen::MatrixXd cc;
  Eigen::MatrixXd cd;
  Eigen::MatrixXd dc;
  Eigen::MatrixXd dd;

  std::size_t m() const noexcept { return static_cast<std::size_t>(cc.rows()); }
  std::size_t n() const noexcept { return static_cast<std::size_t>(dd.rows() != 0 ? dd.rows() : cc.rows()); }
  bool with_dirac() const noexcept { return dd.size() != 0; }
};

struct atom_match {
  atom_index atom;
  double value = 0.0;  // signed inner product
};

/// All J inner products <d, R>_F in O(m^2 log m).
///
/// With A(i, r) = sum_s R(s, r) psi(s, i) (a length-m cosine transform of each
/// zero-padded column of R):
///   cd(i, j) = p_i A(i, j)
///   cc(i, j) = p_i p_j sum_r A(i, r) psi(r, j)   (transform of each row of A)
///   dc(i, j) = p_j sum_r R(i, r) psi(r, j)       (transform of each row of R)
///   dd(i, j) = R(i, j)
inline correlation_map correlate(const dictionary& dict, const Block& residual) {
  const auto n = static_cast<Eigen::Index>(dict.n());
  const auto m = static_cast<Eigen::Index>(dict.m());
  if (residual.rows() != n || residual.cols() != n)
    fail(errc::shape_mismatch, "residual is " + std::to_string(residual.rows()) + "x" +
                                   std::to_string(residual.cols()) + ", dictionary block side is " +
                                   std::to_string(n));
  const auto& p = dict.norms();
  const auto& dct = dict.transform();

  std::vector<double> scratch(2 * static_cast<std::size_t>(m));
  std::vector<double> in(static_cast<std::size_t>(n));
  std::vector<double> out(static_cast<std::size_t>(m));

  // Column transforms: A is m x n.
  Eigen::MatrixXd a(m, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    dct.apply({residual.col(r).data(), static_cast<std::size_t>(n)}, {a.col(r).data(), static_cast<std::size_t>(m)},
              scratch);
  }

  correlation_map map;
  map.cc.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index r = 0; r < n; ++r) in[static_cast<std::size_t>(r)] = a(i, r);
    dct.apply(in, out, scratch);
    for (Eigen::Index j = 0; j < m; ++j) map.cc(i, j) = p(i) * p(j) * out[static_cast<std::size_t>(j)];
  }

  if (!dict.with_dirac()) return map;

  map.cd = p.asDiagonal() * a;
  map.dc.resize(n, m);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index r = 0; r < n; ++r) in[static_cast<std::size_t>(r)] = residual(s, r);
    dct.apply(in, out, scratch);
    for (Eigen::Index j = 0; j < m; ++j) map.dc(s, j) = p(j) * out[static_cast<std::size_t>(j)];
  }
  map.dd = residual;
  return map;
}

namespace detail {

// Scans the planes in flat-index order; a strictly larger magnitude is needed
// to replace the incumbent, so ties go to the smaller flat index. `skip`
// (indexed by flat - 1) masks atoms out of the search.
inline std::optional<atom_match> argmax_atom_masked(const correlation_map& map, const std::vector<bool>* skip) {
  std::optional<atom_match> best;
  double best_mag = 0.0;
  std::size_t flat = 0;
  auto scan = [&](const Eigen::MatrixXd& plane, segment seg) {
    for (Eigen::Index i = 0; i < plane.rows(); ++i) {
      for (Eigen::Index j = 0; j < plane.cols(); ++j) {
        ++flat;
        if (skip != nullptr && (*skip)[flat - 1]) continue;
        const double v = plane(i, j);
        const double mag = std::abs(v);
        if (mag > best_mag) {
          best_mag = mag;
          best = atom_match{atom_index{static_cast<std::uint32_t>(flat), seg, static_cast<std::uint32_t>(i + 1),
                                       static_cast<std::uint32_t>(j + 1)},
                            v};
        }
      }
    }
  };
  scan(map.cc, segment::cos_cos);
  if (map.with_dirac()) {
    scan(map.cd, segment::cos_dirac);
    scan(map.dc, segment::dirac_cos);
    scan(map.dd, segment::dirac_dirac);
  }
  return best;
}

}  // namespace detail

/// The atom maximizing |<d, R>_F|. std::nullopt when every entry is zero
/// (the residual is zero).
inline std::optional<atom_match> argmax_atom(const correlation_map& map) {
  return detail::argmax_atom_masked(map, nullptr);
}

}  // namespace eif
