#include "corpus.hpp"
#include "oracles.hpp"

#include <eif/folding.hpp>
#include <eif/metrics.hpp>

#include <gtest/gtest.h>

#include <iostream>
#include <random>

namespace {

const eif::dictionary& rdcdb8() {
  static const auto d = eif::build_dictionary(eif::rdcdb_params(8));
  return d;
}

// Smallest H satisfying the capacity inequality, by plain enumeration.
std::size_t minimal_hosts(const std::vector<std::size_t>& k, std::size_t dim) {
  for (std::size_t h = 0; h <= k.size(); ++h) {
    std::size_t cap = 0, need = 0;
    for (std::size_t q = 0; q < k.size(); ++q) (q < h ? cap += dim - k[q] : need += k[q]);
    if (cap >= need) return h;
  }
  return k.size();
}

double region_psnr(const eif::gray_image& a, const eif::gray_image& b, std::size_t first_row) {
  double se = 0.0;
  std::size_t count = 0;
  for (std::size_t r = first_row; r < a.height; ++r)
    for (std::size_t c = 0; c < a.width; ++c) {
      const double d = double(a.at(r, c)) - double(b.at(r, c));
      se += d * d;
      ++count;
    }
  return eif::psnr_from_mse(se / double(count), 255.0);
}

TEST(PlanFold, BlockCountOfA256ImageAt8) {
  EXPECT_EQ(eif::block_grid::for_image(256, 256, 8).count(), 1024u);
}

TEST(PlanFold, UniformTenBlocks) {
  const std::vector<std::size_t> k(10, 16);
  const auto plan = eif::plan_fold(k, 8);
  EXPECT_EQ(minimal_hosts(k, 64), 3u);
  EXPECT_EQ(plan.host_count, 3u);
  EXPECT_EQ(plan.capacities, (std::vector<std::size_t>{48, 48, 48}));
  EXPECT_EQ(plan.payload_lengths, std::vector<std::size_t>(7, 16));
  EXPECT_EQ(plan.payload_total(), 112u);
}

TEST(PlanFold, NothingToStore) {
  const std::vector<std::size_t> k(16, 0);
  const auto plan = eif::plan_fold(k, 8);
  EXPECT_EQ(plan.host_count, 0u);
  EXPECT_TRUE(plan.assignment.empty());
  EXPECT_EQ(plan.payload_total(), 0u);
}

TEST(PlanFold, NotFoldableUnlessAllowed) {
  const std::vector<std::size_t> k(4, 60);
  try {
    eif::plan_fold(k, 8);
    FAIL() << "expected not_foldable";
  } catch (const eif::error& e) {
    EXPECT_EQ(e.code(), eif::errc::not_foldable);
  }
  const auto plan = eif::plan_fold(k, 8, true);
  EXPECT_EQ(plan.host_count, 4u);
  EXPECT_TRUE(plan.assignment.empty());
}

TEST(PlanFold, MinimalAndWithinEstimateOnUniformCounts) {
  for (std::size_t k = 1; k <= 40; ++k)
    for (std::size_t q : {7ul, 64ul, 256ul, 1024ul}) {
      const std::vector<std::size_t> counts(q, k);
      const auto plan = eif::plan_fold(counts, 8, true);
      EXPECT_EQ(plan.host_count, minimal_hosts(counts, 64)) << "K=" << k << " Q=" << q;
      const double sr = 64.0 / double(k);
      EXPECT_LE(double(plan.host_count), std::ceil(double(q) / sr) + 1.0);
    }
}

TEST(PlanFold, MinimalOnRandomCounts) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> kd(0, 30), qd(1, 300);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> counts(qd(rng));
    for (auto& k : counts) k = kd(rng);
    const auto plan = eif::plan_fold(counts, 8, true);
    EXPECT_EQ(plan.host_count, minimal_hosts(counts, 64));
  }
}

TEST(PlanFold, AssignmentCoversEveryCoefficientOnce) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> kd(0, 20);
  std::vector<std::size_t> counts(200);
  for (auto& k : counts) k = kd(rng);
  const auto plan = eif::plan_fold(counts, 8);
  std::vector<std::vector<int>> used(plan.host_count);
  for (std::size_t h = 0; h < plan.host_count; ++h) used[h].assign(plan.capacities[h], 0);
  std::vector<std::size_t> covered(counts.size(), 0);
  std::size_t last_host = 0, last_slot = 0;
  for (const auto& seg : plan.assignment) {
    ASSERT_GE(seg.block, plan.host_count);
    EXPECT_EQ(seg.coeff_begin, covered[seg.block]);  // selection order within the block
    covered[seg.block] += seg.count;
    EXPECT_TRUE(seg.host > last_host || (seg.host == last_host && seg.slot >= last_slot));
    for (std::size_t s = seg.slot; s < seg.slot + seg.count; ++s) ++used[seg.host][s];
    last_host = seg.host;
    last_slot = seg.slot + seg.count;
  }
  for (std::size_t q = plan.host_count; q < counts.size(); ++q) EXPECT_EQ(covered[q], counts[q]);
  std::size_t filled = 0;
  for (const auto& host : used)
    for (int u : host) {
      EXPECT_LE(u, 1);
      filled += std::size_t(u);
    }
  EXPECT_EQ(filled, plan.payload_total());
}

TEST(Quantize, ConstantBlock) {
  const eif::Block g = eif::Block::Constant(8, 8, 100.0);
  const auto q = eif::quantize_host(g, 8);
  EXPECT_EQ(q.offset, 100.0);
  EXPECT_EQ(q.scale, 1.0);
  for (auto s : q.samples) EXPECT_EQ(s, q.samples.front());
  EXPECT_TRUE(eif::dequantize(q.samples, 8, q.offset, q.scale) == g);
}

TEST(Quantize, HalfStepBound) {
  std::mt19937_64 rng(6);
  eif::Block g = oracle::random_block(8, rng, -3.7, 312.2);
  g(0, 0) = -3.7;
  g(7, 7) = 312.2;
  const auto q = eif::quantize_host(g, 8);
  EXPECT_NEAR(q.scale, 315.9 / 255.0, 1e-12);
  EXPECT_EQ(*std::min_element(q.samples.begin(), q.samples.end()), 0);
  EXPECT_EQ(*std::max_element(q.samples.begin(), q.samples.end()), 255);
  const eif::Block back = eif::dequantize(q.samples, 8, q.offset, q.scale);
  EXPECT_LE((back - g).cwiseAbs().maxCoeff(), q.scale / 2.0 + 1e-12);
}

TEST(Quantize, RandomBlocksSmallRelativeError) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const eif::Block g = oracle::random_block(8, rng, -20.0, 280.0);
    const auto q = eif::quantize_host(g, 8);
    const eif::Block back = eif::dequantize(q.samples, 8, q.offset, q.scale);
    EXPECT_LT((back - g).norm() / g.norm(), 0.005);
  }
}

TEST(Quantize, SixteenBitUsesFullRange) {
  std::mt19937_64 rng(8);
  const eif::Block g = oracle::random_block(8, rng, 0.0, 1000.0);
  const auto q = eif::quantize_host(g, 16);
  EXPECT_EQ(*std::max_element(q.samples.begin(), q.samples.end()), 65535);
  EXPECT_LE((eif::dequantize(q.samples, 8, q.offset, q.scale) - g).cwiseAbs().maxCoeff(), q.scale / 2.0 + 1e-9);
}

// Every 8x8 block is a constant plus one spike: exactly two atoms.
eif::gray_image two_atom_image(std::size_t blocks_per_side, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(40, 200), spike(10, 50), pos(0, 7);
  const std::size_t side = 8 * blocks_per_side;
  eif::gray_image img{side, side, 8, std::vector<std::uint16_t>(side * side)};
  for (std::size_t br = 0; br < blocks_per_side; ++br)
    for (std::size_t bc = 0; bc < blocks_per_side; ++bc) {
      const int v = level(rng), a = spike(rng), sr = pos(rng), sc = pos(rng);
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) img.at(br * 8 + r, bc * 8 + c) = std::uint16_t(v + (r == sr && c == sc ? a : 0));
    }
  return img;
}

TEST(Fold, ExactAtomImageRoundTrips) {
  const auto img = two_atom_image(8, 1);
  const auto stop = eif::stop_rule::for_psnr(40.0);
  const auto folded = eif::fold(img, rdcdb8(), stop, 0xABCDEF, 7);
  for (auto k : folded.atom_counts) EXPECT_LE(k, 2u);
  EXPECT_LT(folded.host_count, folded.q_total());
  const auto back = eif::unfold(folded, rdcdb8(), 0xABCDEF);
  EXPECT_GE(eif::psnr(img, back), 40.0);
}

TEST(Fold, Deterministic) {
  const auto img = corpus::crop(corpus::load("camera"), 64, 64);
  const auto stop = eif::stop_rule::for_psnr(40.0);
  const auto a = eif::fold(img, rdcdb8(), stop, 1234, 99);
  const auto b = eif::fold(img, rdcdb8(), stop, 1234, 99, {false, 1});
  EXPECT_TRUE(a == b);
  const auto c = eif::fold(img, rdcdb8(), stop, 1234, 100);
  EXPECT_FALSE(a.seeds == c.seeds);
  for (std::size_t h = 0; h < a.host_count; ++h) EXPECT_EQ(a.seeds[h], eif::derive_key(99, h));
}

TEST(Fold, HostPixelsWithinBitDepth) {
  const auto img = corpus::crop(corpus::load("coins"), 64, 64);
  const auto folded = eif::fold(img, rdcdb8(), eif::stop_rule::for_psnr(40.0), 5, 6);
  EXPECT_EQ(folded.host_pixels.size(), folded.host_count * 64);
  for (auto s : folded.host_pixels) EXPECT_LE(s, 255);
  for (auto i : folded.atom_indices) {
    EXPECT_GE(i, 1u);
    EXPECT_LE(i, rdcdb8().atom_count());
  }
}

TEST(Fold, CorrectAndWrongKey) {
  const auto img = corpus::crop(corpus::load("camera"), 128, 128);
  const auto stop = eif::stop_rule::for_psnr(40.0);
  const auto folded = eif::fold(img, rdcdb8(), stop, 0x1111, 0x2222);
  ASSERT_GT(folded.host_count, 0u);
  ASSERT_LT(folded.host_count, folded.q_total());
  const auto good = eif::unfold(folded, rdcdb8(), 0x1111);
  const auto bad = eif::unfold(folded, rdcdb8(), 0x1112);
  EXPECT_GE(eif::psnr(img, good), 39.5);

  // Hosts are keyless: identical under both keys.
  const auto good_blocks = eif::unfold_approximations(folded, rdcdb8(), 0x1111);
  const auto bad_blocks = eif::unfold_approximations(folded, rdcdb8(), 0x1112);
  for (std::size_t h = 0; h < folded.host_count; ++h) EXPECT_TRUE(good_blocks[h] == bad_blocks[h]);

  const std::size_t blocks_per_row = img.width / 8;
  const std::size_t first_row = ((folded.host_count + blocks_per_row - 1) / blocks_per_row) * 8;
  EXPECT_GE(region_psnr(img, good, first_row) - region_psnr(img, bad, first_row), 15.0);
}

TEST(Fold, AllHostsIsIdentityUpToQuantization) {
  const auto img = corpus::crop(corpus::load("astronaut"), 8, 8);
  const auto stop = eif::stop_rule::for_psnr(40.0);
  EXPECT_THROW(eif::fold(img, rdcdb8(), stop, 1, 2), eif::error);
  const auto folded = eif::fold(img, rdcdb8(), stop, 1, 2, {true, 0});
  ASSERT_EQ(folded.host_count, folded.q_total());
  const auto approx = eif::fold_real(img, rdcdb8(), stop, 1, 2, {true, 0}).approximations;
  const auto back = eif::unfold_approximations(folded, rdcdb8(), 1);
  for (std::size_t q = 0; q < approx.size(); ++q) EXPECT_LT((back[q] - approx[q]).norm() / approx[q].norm(), 0.01);
}

TEST(Fold, LosslessWithoutQuantization) {
  const auto img = corpus::crop(corpus::load("chelsea"), 128, 128);
  const auto field = eif::fold_real(img, rdcdb8(), eif::stop_rule::for_psnr(40.0), 77, 88);
  std::vector<std::uint32_t> counts, indices;
  for (const auto& rep : field.reps) {
    counts.push_back(std::uint32_t(rep.size()));
    for (const auto& idx : rep.indices()) indices.push_back(idx.flat);
  }
  const auto blocks =
      eif::unfold_blocks(rdcdb8(), counts, indices, field.plan.host_count, field.hosts, field.seeds, 77);
  double worst = 0.0;
  for (std::size_t q = 0; q < blocks.size(); ++q)
    worst = std::max(worst, (blocks[q] - field.approximations[q]).norm() / std::max(1.0, field.approximations[q].norm()));
  EXPECT_LT(worst, 1e-6);
}

TEST(Fold, HostTransparency) {
  const auto img = corpus::crop(corpus::load("coffee"), 128, 128);
  const auto stop = eif::stop_rule::for_psnr(40.0);
  const auto field = eif::fold_real(img, rdcdb8(), stop, 3, 4);
  const auto folded = eif::fold(img, rdcdb8(), stop, 3, 4);
  const auto blocks = eif::unfold_approximations(folded, rdcdb8(), 3);
  double sum = 0.0, worst = 0.0;
  for (std::size_t h = 0; h < folded.host_count; ++h) {
    const auto& ik = field.approximations[h];
    const double err = (blocks[h] - ik).norm();
    // Projection cannot enlarge the dequantization error of at most scale/2 per pixel.
    EXPECT_LE(err, 8.0 * folded.quant[h].scale / 2.0 + 1e-9) << "host " << h;
    sum += err / ik.norm();
    worst = std::max(worst, err / ik.norm());
  }
  const double mean = sum / double(folded.host_count);
  std::cout << "[ hosts ] relative host error mean " << mean << " max " << worst << " over " << folded.host_count
            << " hosts\n";
  EXPECT_LE(mean, 0.03);
}

TEST(Fold, HostCountFollowsSparsity) {
  const auto img = corpus::crop(corpus::load("camera"), 64, 64);
  std::size_t last_h = 0, last_atoms = 0;
  for (double db : {28.0, 32.0, 36.0, 40.0}) {
    const auto folded = eif::fold(img, rdcdb8(), eif::stop_rule::for_psnr(db), 1, 1);
    EXPECT_GE(folded.host_count, last_h) << db;
    EXPECT_GE(folded.total_atoms(), last_atoms) << db;
    last_h = folded.host_count;
    last_atoms = folded.total_atoms();
  }
  EXPECT_GT(last_h, 0u);
}

TEST(Fold, RejectsNonDivisibleDimensions) {
  eif::gray_image img{20, 16, 8, std::vector<std::uint16_t>(320, 9)};
  try {
    eif::fold(img, rdcdb8(), eif::stop_rule::for_psnr(40.0), 1, 1);
    FAIL() << "expected invalid_argument";
  } catch (const eif::error& e) {
    EXPECT_EQ(e.code(), eif::errc::invalid_argument);
  }
}

TEST(Unfold, RejectsInconsistentSidecar) {
  const auto img = corpus::crop(corpus::load("rocket"), 32, 32);
  const auto folded = eif::fold(img, rdcdb8(), eif::stop_rule::for_psnr(40.0), 1, 1);
  const auto other = eif::build_dictionary(eif::rdcdb_params(8, 4));
  EXPECT_THROW(eif::unfold(folded, other, 1), eif::error);
  auto broken = folded;
  broken.atom_indices.pop_back();
  EXPECT_THROW(eif::unfold(broken, rdcdb8(), 1), eif::error);
}

}  // namespace
