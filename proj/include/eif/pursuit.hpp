#pragma once

#include "eif/block.hpp"
#include "eif/correlation.hpp"
#include "eif/dictionary.hpp"
#include "eif/error.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace eif {

// Candidates whose component orthogonal to the current span is shorter than
// this fraction of their own norm are treated as dependent and skipped.
inline constexpr double dependence_tolerance = 1e-10;

/// The span of a sequence of selected atoms, kept as a Frobenius-orthonormal
/// basis q_1..q_K plus the biorthogonal duals b_1..b_K (<b_i, d_j>_F = delta_ij).
/// Duals are updated adaptively as atoms are appended, so least-squares
/// coefficients are always available as <b_i, x>_F.
class atom_span {
 public:
  explicit atom_span(std::size_t side = 0) : side_(side) {}

  std::size_t side() const noexcept { return side_; }
  std::size_t size() const noexcept { return indices_.size(); }
  bool empty() const noexcept { return indices_.empty(); }

  const std::vector<atom_index>& indices() const noexcept { return indices_; }
  const std::vector<Block>& ortho_basis() const noexcept { return basis_; }
  const std::vector<Block>& duals() const noexcept { return duals_; }

  /// Appends `atom` unless it is numerically inside the current span.
  bool try_append(const Block& atom, const atom_index& idx) {
    Block gamma = atom;
    // Classical Gram-Schmidt applied twice keeps the basis orthonormal to
    // working precision.
    for (int pass = 0; pass < 2; ++pass)
      for (const Block& q : basis_) gamma -= frobenius_dot(q, gamma) * q;
    const double norm = gamma.norm();
    if (!(norm >= dependence_tolerance * atom.norm()) || norm == 0.0) return false;

    Block dual = gamma / (norm * norm);
    for (Block& b : duals_) b -= frobenius_dot(atom, b) * dual;
    duals_.push_back(std::move(dual));
    basis_.push_back(gamma / norm);
    indices_.push_back(idx);
    return true;
  }

  /// Rebuilds a span from stored indices, in order. The arithmetic matches the
  /// incremental path exactly, so the basis is bit-identical to the one
  /// produced during decomposition.
  static atom_span from_indices(const dictionary& dict, std::span<const atom_index> indices) {
    atom_span span(dict.n());
    for (const atom_index& idx : indices) {
      if (!span.try_append(dict.atom_pixels(idx), idx))
        fail(errc::dictionary_mismatch, "atom " + std::to_string(idx.flat) + " is dependent on earlier atoms");
    }
    return span;
  }

  /// Orthogonal projection sum_i <q_i, x>_F q_i.
  Block project(const Block& x) const {
    Block out = Block::Zero(x.rows(), x.cols());
    for (const Block& q : basis_) out += frobenius_dot(q, x) * q;
    return out;
  }

  std::vector<double> coefficients(const Block& x) const {
    std::vector<double> c;
    c.reserve(duals_.size());
    for (const Block& b : duals_) c.push_back(frobenius_dot(b, x));
    return c;
  }

 private:
  std::size_t side_;
  std::vector<atom_index> indices_;
  std::vector<Block> basis_;
  std::vector<Block> duals_;
};

/// Sparse representation I^K = sum_i c_i d_{l_i} of one block.
struct sparse_rep {
  atom_span span;
  std::vector<double> coeffs;

  std::size_t size() const noexcept { return coeffs.size(); }
  std::size_t block_side() const noexcept { return span.side(); }
  const std::vector<atom_index>& indices() const noexcept { return span.indices(); }
  const std::vector<Block>& ortho_basis() const noexcept { return span.ortho_basis(); }
  const std::vector<Block>& duals() const noexcept { return span.duals(); }
};

struct stop_rule {
  enum class kind : std::uint8_t { target_block_mse = 0, max_atoms = 1, residual_tol = 2 };

  kind mode = kind::target_block_mse;
  double target_mse = 0.0;     // pixel^2, per block
  std::uint32_t max_atoms = 0;  // 0 = no cap; applies in every mode
  double residual_tol = 0.0;   // Frobenius norm of the residual

  /// Per-block MSE bound 255^2 / 10^(psnr/10) (peak scaled to the bit depth).
  /// Meeting it in every block guarantees at least `psnr_db` globally.
  static stop_rule for_psnr(double psnr_db, unsigned bitdepth = 8) {
    const double peak = std::ldexp(1.0, static_cast<int>(bitdepth)) - 1.0;
    return block_mse(peak * peak / std::pow(10.0, psnr_db / 10.0));
  }
  static stop_rule block_mse(double mse) { return stop_rule{kind::target_block_mse, mse, 0, 0.0}; }
  static stop_rule atoms(std::uint32_t k) { return stop_rule{kind::max_atoms, 0.0, k, 0.0}; }
  static stop_rule residual(double tol) { return stop_rule{kind::residual_tol, 0.0, 0, tol}; }

  void validate() const {
    switch (mode) {
      case kind::target_block_mse:
        if (!(target_mse > 0.0) || !std::isfinite(target_mse))
          fail(errc::invalid_argument, "target block MSE must be positive");
        break;
      case kind::max_atoms:
        if (max_atoms == 0) fail(errc::invalid_argument, "max_atoms stop rule needs a positive atom count");
        break;
      case kind::residual_tol:
        if (!(residual_tol >= 0.0) || !std::isfinite(residual_tol))
          fail(errc::invalid_argument, "residual tolerance must be non-negative");
        break;
      default: fail(errc::invalid_argument, "unknown stop rule");
    }
  }

  bool satisfied(double residual_sq, std::size_t atoms, std::size_t side) const {
    if (max_atoms != 0 && atoms >= max_atoms) return true;
    switch (mode) {
      case kind::target_block_mse: return residual_sq / static_cast<double>(side * side) <= target_mse;
      case kind::max_atoms: return false;
      case kind::residual_tol: return std::sqrt(residual_sq) <= residual_tol;
    }
    return true;
  }

  friend bool operator==(const stop_rule&, const stop_rule&) = default;
};

/// Orthogonal Matching Pursuit: at each step select the atom with the largest
/// |<d, R>_F| (smallest flat index on ties), append it to the span, refit all
/// coefficients by least squares, and update the residual. Stops when the
/// rule is met, the residual vanishes, or K = n^2.
///
/// If `residual_norms` is given it receives ||R^k||_F for k = 0..K.
inline sparse_rep omp_decompose(const Block& block, const dictionary& dict, const stop_rule& stop,
                                std::vector<double>* residual_norms = nullptr) {
  const std::size_t n = dict.n();
  if (static_cast<std::size_t>(block.rows()) != n || static_cast<std::size_t>(block.cols()) != n)
    fail(errc::shape_mismatch, "block side does not match dictionary");
  stop.validate();

  sparse_rep rep{atom_span(n), {}};
  Block residual = block;
  double residual_sq = residual.squaredNorm();
  const double floor_sq = 1e-24 * residual_sq;
  if (residual_norms) residual_norms->assign(1, std::sqrt(residual_sq));

  std::vector<bool> skip;
  while (rep.span.size() < n * n && !stop.satisfied(residual_sq, rep.span.size(), n) && residual_sq > floor_sq) {
    const correlation_map map = correlate(dict, residual);
    bool appended = false;
    while (!appended) {
      const auto best = detail::argmax_atom_masked(map, skip.empty() ? nullptr : &skip);
      if (!best) break;
      appended = rep.span.try_append(dict.atom_pixels(best->atom), best->atom);
      if (!appended) {
        if (skip.empty()) skip.assign(dict.atom_count(), false);
        skip[best->atom.flat - 1] = true;
      }
    }
    if (!appended) break;

    const Block& q = rep.span.ortho_basis().back();
    residual -= frobenius_dot(q, residual) * q;
    residual_sq = residual.squaredNorm();
    if (residual_norms) residual_norms->push_back(std::sqrt(residual_sq));
  }
  rep.coeffs = rep.span.coefficients(block);
  return rep;
}

/// Synthesis sum_i c_i d_{l_i}.
inline Block reconstruct(const sparse_rep& rep, const dictionary& dict) {
  if (rep.coeffs.size() != rep.indices().size())
    fail(errc::invalid_argument, "coefficient and index counts differ");
  Block out = zero_block(dict.n());
  for (std::size_t k = 0; k < rep.coeffs.size(); ++k) {
    const atom_index& idx = rep.indices()[k];
    if (idx.flat < 1 || idx.flat > dict.atom_count())
      fail(errc::out_of_range, "atom " + std::to_string(idx.flat) + " outside dictionary");
    out += rep.coeffs[k] * dict.atom_pixels(idx);
  }
  return out;
}

inline Block reconstruct(std::span<const atom_index> indices, std::span<const double> coeffs, const dictionary& dict) {
  if (coeffs.size() != indices.size()) fail(errc::invalid_argument, "coefficient and index counts differ");
  Block out = zero_block(dict.n());
  for (std::size_t k = 0; k < coeffs.size(); ++k) out += coeffs[k] * dict.atom_pixels(dict.index(indices[k].flat));
  return out;
}

inline Block project(const Block& pixels, const atom_span& span) { return span.project(pixels); }
inline Block project(const Block& pixels, const sparse_rep& rep) { return rep.span.project(pixels); }

}  // namespace eif
