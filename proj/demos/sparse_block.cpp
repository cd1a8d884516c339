// Sparse-codes one 8x8 block with the RDC-DB dictionary and lists the atoms.

#include <eif/eif.hpp>

#include <cmath>
#include <cstdio>

namespace {

const char* segment_name(eif::segment s) {
  switch (s) {
    case eif::segment::cos_cos: return "cos x cos";
    case eif::segment::cos_dirac: return "cos x dirac";
    case eif::segment::dirac_cos: return "dirac x cos";
    case eif::segment::dirac_dirac: return "dirac x dirac";
  }
  return "?";
}

}  // namespace

int main() {
  eif::Block block(8, 8);
  for (int s = 0; s < 8; ++s)
    for (int r = 0; r < 8; ++r) block(s, r) = 100.0 + 6.0 * r + (r > 4 ? 40.0 : 0.0) + (s == 2 && r == 3 ? 25.0 : 0.0);

  const eif::dictionary dict(eif::rdcdb_params(8));
  const eif::sparse_rep rep = eif::omp_decompose(block, dict, eif::stop_rule::for_psnr(45.0));
  const eif::Block approx = eif::reconstruct(rep, dict);

  std::printf("%zu of %zu atoms, block PSNR %.2f dB\n", rep.size(), dict.atom_count(),
              eif::psnr_from_mse((block - approx).squaredNorm() / 64.0, 255.0));
  for (std::size_t k = 0; k < rep.size(); ++k) {
    const auto& idx = rep.indices()[k];
    std::printf("  %4u  %-13s i=%-2u j=%-2u  c=%9.3f\n", idx.flat, segment_name(idx.seg), idx.i, idx.j, rep.coeffs[k]);
  }
}
