#include "oracles.hpp"

#include <eif/metrics.hpp>
#include <eif/pursuit.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <iostream>
#include <random>
#include <set>

namespace {

using eif::segment;

TEST(Omp, SingleAtomInput) {
  const auto dict = eif::build_dictionary({8, 16, true});
  const auto atom = dict.index(segment::dirac_dirac, 4, 4);
  const eif::Block block = 3.0 * dict.atom_pixels(atom);
  const auto rep = eif::omp_decompose(block, dict, eif::stop_rule::residual(1e-9));
  ASSERT_EQ(rep.size(), 1u);
  EXPECT_EQ(rep.indices()[0], atom);
  EXPECT_NEAR(rep.coeffs[0], 3.0, 1e-14);
}

TEST(Omp, ZeroBlockGivesEmptyRep) {
  const auto dict = eif::build_dictionary({8, 16, true});
  for (const auto& stop : {eif::stop_rule::for_psnr(40.0), eif::stop_rule::residual(0.0), eif::stop_rule::atoms(5)}) {
    const auto rep = eif::omp_decompose(eif::zero_block(8), dict, stop);
    EXPECT_EQ(rep.size(), 0u);
    EXPECT_TRUE(rep.ortho_basis().empty());
  }
}

TEST(Omp, PsnrTargetOnSmoothBlocks) {
  const auto dict = eif::build_dictionary({8, 16, true});
  const auto stop = eif::stop_rule::for_psnr(40.0);
  EXPECT_NEAR(stop.target_mse, 255.0 * 255.0 / 1e4, 1e-12);
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const eif::Block block = oracle::smooth_block(8, rng);
    const auto rep = eif::omp_decompose(block, dict, stop);
    const double mse = (block - eif::reconstruct(rep, dict)).squaredNorm() / 64.0;
    EXPECT_GE(eif::psnr_from_mse(mse, 255.0), 40.0);
    EXPECT_LT(rep.size(), 64u);
  }
}

TEST(Omp, ResidualMonotoneAndOrthogonalToSelection) {
  std::mt19937_64 rng(99);
  for (auto [n, m] : {std::pair{8, 16}, {8, 8}, {4, 8}}) {
    const auto dict = eif::build_dictionary({static_cast<std::size_t>(n), static_cast<std::size_t>(m), true});
    for (int trial = 0; trial < 10; ++trial) {
      const eif::Block block = trial % 2 ? oracle::smooth_block(n, rng) : oracle::random_block(n, rng, 0.0, 255.0);
      std::vector<double> norms;
      const auto full = eif::omp_decompose(block, dict, eif::stop_rule::residual(1e-6), &norms);
      ASSERT_EQ(norms.size(), full.size() + 1);
      for (std::size_t k = 1; k < norms.size(); ++k) EXPECT_LE(norms[k], norms[k - 1] * (1.0 + 1e-12));

      // Prefixes of a decomposition are the decompositions with fewer atoms.
      for (std::size_t k : {1ul, 3ul, full.size() / 2, full.size()}) {
        if (k == 0) continue;
        const auto rep = eif::omp_decompose(block, dict, eif::stop_rule::atoms(static_cast<std::uint32_t>(k)));
        const eif::Block residual = block - eif::reconstruct(rep, dict);
        for (const auto& idx : rep.indices())
          EXPECT_LE(std::abs(eif::frobenius_dot(dict.atom_pixels(idx), residual)), 1e-8);
      }
    }
  }
}

TEST(Omp, SelectionIsDistinctAndBasisOrthonormal) {
  std::mt19937_64 rng(5);
  const auto dict = eif::build_dictionary({8, 16, true});
  const eif::Block block = oracle::random_block(8, rng, 0.0, 255.0);
  const auto rep = eif::omp_decompose(block, dict, eif::stop_rule::residual(0.0));
  EXPECT_LE(rep.size(), 64u);
  std::set<std::uint32_t> flats;
  for (const auto& idx : rep.indices()) flats.insert(idx.flat);
  EXPECT_EQ(flats.size(), rep.size());
  const auto& q = rep.ortho_basis();
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) EXPECT_NEAR(eif::frobenius_dot(q[i], q[j]), i == j ? 1.0 : 0.0, 1e-10);
  // Duals are biorthogonal to the selected atoms.
  for (std::size_t i = 0; i < rep.size(); ++i)
    for (std::size_t j = 0; j < rep.size(); ++j)
      EXPECT_NEAR(eif::frobenius_dot(rep.duals()[i], dict.atom_pixels(rep.indices()[j])), i == j ? 1.0 : 0.0, 1e-8);
}

TEST(Omp, FullRankRunReachesZeroResidual) {
  std::mt19937_64 rng(8);
  const auto dict = eif::build_dictionary({4, 8, true});
  const eif::Block block = oracle::random_block(4, rng, -10.0, 10.0);
  const auto rep = eif::omp_decompose(block, dict, eif::stop_rule::residual(0.0));
  EXPECT_LE(rep.size(), 16u);
  EXPECT_LT((block - eif::reconstruct(rep, dict)).norm(), 1e-9 * block.norm());
}

TEST(Omp, CoefficientsAreLeastSquaresOptimal) {
  std::mt19937_64 rng(31);
  const auto dict = eif::build_dictionary({8, 16, true});
  for (int trial = 0; trial < 20; ++trial) {
    const eif::Block block = oracle::smooth_block(8, rng);
    const auto k = static_cast<std::uint32_t>(1 + trial % 12);
    const auto rep = eif::omp_decompose(block, dict, eif::stop_rule::atoms(k));
    std::vector<eif::Block> atoms;
    for (const auto& idx : rep.indices()) atoms.push_back(dict.atom_pixels(idx));
    const Eigen::VectorXd ls = oracle::least_squares(atoms, block);
    for (std::size_t i = 0; i < rep.size(); ++i)
      EXPECT_NEAR(rep.coeffs[i], ls(static_cast<Eigen::Index>(i)), 1e-8 * std::max(1.0, std::abs(ls(static_cast<Eigen::Index>(i)))));
  }
}

TEST(Omp, ReconstructionIsProjectionOfSource) {
  std::mt19937_64 rng(12);
  const auto dict = eif::build_dictionary({8, 16, true});
  const eif::Block block = oracle::smooth_block(8, rng);
  const auto rep = eif::omp_decompose(block, dict, eif::stop_rule::for_psnr(40.0));
  const eif::Block recon = eif::reconstruct(rep, dict);
  EXPECT_LE((recon - eif::project(block, rep)).norm(), 1e-8 * recon.norm());
}

TEST(Omp, RejectsBadInputs) {
  const auto dict = eif::build_dictionary({8, 16, true});
  EXPECT_THROW(eif::omp_decompose(eif::zero_block(4), dict, eif::stop_rule::atoms(2)), eif::error);
  EXPECT_THROW(eif::omp_decompose(eif::zero_block(8), dict, eif::stop_rule::block_mse(0.0)), eif::error);
  EXPECT_THROW(eif::omp_decompose(eif::zero_block(8), dict, eif::stop_rule::atoms(0)), eif::error);
  EXPECT_THROW(eif::omp_decompose(eif::zero_block(8), dict, eif::stop_rule::residual(-1.0)), eif::error);
}

TEST(AtomSpan, RejectsDependentAtoms) {
  const auto dict = eif::build_dictionary({4, 8, true});
  eif::atom_span span(4);
  const auto a = dict.index(segment::cos_cos, 1, 1);
  EXPECT_TRUE(span.try_append(dict.atom_pixels(a), a));
  EXPECT_FALSE(span.try_append(dict.atom_pixels(a), a));
  // Column-wise Dirac atoms of the constant cosine span the cos-cos DC atom.
  eif::atom_span cols(4);
  for (std::uint32_t j = 1; j <= 4; ++j) {
    const auto idx = dict.index(segment::cos_dirac, 1, j);
    ASSERT_TRUE(cols.try_append(dict.atom_pixels(idx), idx));
  }
  EXPECT_FALSE(cols.try_append(dict.atom_pixels(a), a));
  EXPECT_EQ(cols.size(), 4u);
}

TEST(AtomSpan, FromIndicesReproducesDecompositionBasis) {
  std::mt19937_64 rng(4);
  const auto dict = eif::build_dictionary({8, 16, true});
  const auto rep = eif::omp_decompose(oracle::smooth_block(8, rng), dict, eif::stop_rule::for_psnr(45.0));
  const auto rebuilt = eif::atom_span::from_indices(dict, rep.indices());
  ASSERT_EQ(rebuilt.size(), rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i) EXPECT_TRUE(rebuilt.ortho_basis()[i] == rep.ortho_basis()[i]);
}

TEST(Reconstruct, Examples) {
  const auto dict = eif::build_dictionary({8, 16, true});
  eif::sparse_rep empty{eif::atom_span(8), {}};
  EXPECT_EQ(eif::reconstruct(empty, dict), eif::zero_block(8));

  const auto atom = dict.index(segment::dirac_dirac, 2, 6);
  eif::sparse_rep one{eif::atom_span(8), {7.0}};
  one.span.try_append(dict.atom_pixels(atom), atom);
  eif::Block expected = eif::zero_block(8);
  expected(1, 5) = 7.0;
  EXPECT_EQ(eif::reconstruct(one, dict), expected);
}

TEST(Reconstruct, MatchesDirectSummation) {
  std::mt19937_64 rng(17);
  const auto dict = eif::build_dictionary({8, 16, true});
  const auto atoms = oracle::all_atoms(8, 16);
  std::uniform_int_distribution<std::size_t> pick(1, dict.atom_count());
  std::uniform_real_distribution<double> coef(-20.0, 20.0);
  for (int trial = 0; trial < 20; ++trial) {
    eif::sparse_rep rep{eif::atom_span(8), {}};
    eif::Block direct = eif::zero_block(8);
    while (rep.size() < 5) {
      const auto idx = dict.index(pick(rng));
      if (!rep.span.try_append(dict.atom_pixels(idx), idx)) continue;
      rep.coeffs.push_back(coef(rng));
      direct += rep.coeffs.back() * atoms[idx.flat - 1];
    }
    EXPECT_LT((eif::reconstruct(rep, dict) - direct).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Reconstruct, RejectsIndexOutsideDictionary) {
  const auto big = eif::build_dictionary({8, 16, true});
  const auto small = eif::build_dictionary(eif::dct_params(8));
  const auto idx = big.index(segment::dirac_dirac, 1, 1);
  eif::sparse_rep rep{eif::atom_span(8), {1.0}};
  rep.span.try_append(big.atom_pixels(idx), idx);
  EXPECT_THROW(eif::reconstruct(rep, small), eif::error);
}

TEST(Project, FixedPointsIdempotenceAndAnnihilation) {
  std::mt19937_64 rng(21);
  const auto dict = eif::build_dictionary({8, 16, true});
  const auto rep = eif::omp_decompose(oracle::smooth_block(8, rng), dict, eif::stop_rule::atoms(10));
  const eif::Block& q1 = rep.ortho_basis()[0];
  EXPECT_LT((eif::project(q1, rep) - q1).norm(), 1e-12);

  const eif::Block x = oracle::random_block(8, rng, -5.0, 5.0);
  const eif::Block px = eif::project(x, rep);
  EXPECT_LT((eif::project(px, rep) - px).norm(), 1e-10 * px.norm());

  const eif::Block f = x - px;  // orthogonal to the span
  EXPECT_LT(eif::project(f, rep).norm(), 1e-10 * x.norm());

  const eif::Block ik = eif::reconstruct(rep, dict);
  EXPECT_LT((eif::project(ik + f, rep) - ik).norm(), 1e-8 * ik.norm());
}

// Five atoms with pairwise coherence below 0.5 and coefficients in [1, 10].
struct synthetic_case {
  std::vector<eif::atom_index> atoms;
  eif::Block block;
};

synthetic_case synthesize(const eif::dictionary& dict, std::mt19937_64& rng, std::size_t count) {
  std::uniform_int_distribution<std::size_t> pick(1, dict.atom_count());
  std::uniform_real_distribution<double> coef(1.0, 10.0);
  synthetic_case out{{}, eif::zero_block(dict.n())};
  std::vector<eif::Block> chosen;
  while (out.atoms.size() < count) {
    const auto idx = dict.index(pick(rng));
    const eif::Block a = dict.atom_pixels(idx);
    bool separated = true;
    for (const auto& c : chosen) separated = separated && std::abs(eif::frobenius_dot(a, c)) < 0.5;
    if (!separated) continue;
    chosen.push_back(a);
    out.atoms.push_back(idx);
    out.block += coef(rng) * a;
  }
  return out;
}

TEST(Omp, RecoversWellSeparatedSyntheticBlocks) {
  const auto dict = eif::build_dictionary({8, 16, true});
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const auto sc = synthesize(dict, rng, 5);
    const auto rep = eif::omp_decompose(sc.block, dict, eif::stop_rule::residual(1e-9 * sc.block.norm()));
    EXPECT_LT((sc.block - eif::reconstruct(rep, dict)).norm(), 1e-6) << "seed " << seed;
  }
}

// Coherence below 0.5 does not by itself guarantee that greedy selection
// finds the generating support. Check that every selection agrees with a
// textbook OMP, and report how often the support is recovered.
TEST(Omp, SyntheticSelectionMatchesTextbookOmp) {
  const auto dict = eif::build_dictionary({8, 16, true});
  const auto atoms = oracle::all_atoms(8, 16);
  int support_hits = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const auto sc = synthesize(dict, rng, 5);
    const double tol = 1e-9 * sc.block.norm();
    const auto rep = eif::omp_decompose(sc.block, dict, eif::stop_rule::residual(tol));
    const auto ref = oracle::omp_selection(atoms, sc.block, tol, 64);
    std::vector<std::size_t> got;
    for (const auto& idx : rep.indices()) got.push_back(idx.flat - 1);
    EXPECT_EQ(got, ref) << "seed " << seed;
    std::set<std::uint32_t> want, have;
    for (const auto& a : sc.atoms) want.insert(a.flat);
    for (const auto& a : rep.indices()) have.insert(a.flat);
    support_hits += want == have;
  }
  std::cout << "[ support ] generating atom set recovered on " << support_hits << "/100 seeds\n";
}

}  // namespace
