#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace eif {

/// A square block of pixels (or any n x n real matrix). Element (s, r) is row s, column r.
using Block = Eigen::MatrixXd;

inline double frobenius_dot(const Block& a, const Block& b) { return a.cwiseProduct(b).sum(); }

inline double frobenius_norm(const Block& a) { return a.norm(); }

inline Block zero_block(std::size_t n) {
  return Block::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

}  // namespace eif
