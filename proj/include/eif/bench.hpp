#pragma once

#include "eif/dictionary.hpp"
#include "eif/error.hpp"
#include "eif/folding.hpp"
#include "eif/image.hpp"
#include "eif/metrics.hpp"
#include "eif/parallel.hpp"
#include "eif/pursuit.hpp"

#include <chrono>
#include <cstddef>
#include <iomanip>
#include <locale>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eif {

enum class coder_kind { rdcdb, dct };

constexpr std::string_view coder_name(coder_kind c) noexcept { return c == coder_kind::rdcdb ? "RDC-DB" : "DCT"; }

/// rdcdb: redundant cosines (m = redundancy * n) plus Dirac atoms.
/// dct: the same machinery restricted to m = n without Dirac atoms.
inline dict_params coder_params(coder_kind coder, std::size_t n, std::size_t redundancy = 2) {
  return coder == coder_kind::rdcdb ? rdcdb_params(n, redundancy) : dct_params(n);
}

/// Sparse coding of a whole image, block by block.
struct coded_image {
  block_grid grid;
  std::vector<sparse_rep> reps;
  std::vector<double> approximation;  // row-major, real-valued

  std::size_t total_coefficients() const noexcept {
    std::size_t total = 0;
    for (const sparse_rep& r : reps) total += r.size();
    return total;
  }
};

inline coded_image code_image(const gray_image& image, const dictionary& dict, const stop_rule& stop, unsigned threads = 0) {
  image.validate();
  coded_image out;
  out.grid = block_grid::for_image(image.width, image.height, dict.n());
  const std::vector<Block> blocks = extract_blocks(image, out.grid);
  out.reps.resize(blocks.size());
  std::vector<Block> approx(blocks.size());
  detail::parallel_for(
      blocks.size(),
      [&](std::size_t q) {
        out.reps[q] = omp_decompose(blocks[q], dict, stop);
        approx[q] = reconstruct(out.reps[q], dict);
      },
      threads);
  out.approximation = assemble(approx, out.grid);
  return out;
}

struct named_image {
  std::string name;
  gray_image image;
};

struct bench_row {
  std::string image;
  coder_kind coder = coder_kind::rdcdb;
  double psnr_db = 0.0;
  double sr = 0.0;
  std::size_t q = 0;
  std::size_t h = 0;
  double runtime_s = 0.0;
  std::string error;  // empty on success

  bool ok() const noexcept { return error.empty(); }
};

struct bench_report {
  std::vector<bench_row> rows;

  const bench_row* find(std::string_view image, coder_kind coder) const {
    for (const bench_row& r : rows)
      if (r.image == image && r.coder == coder) return &r;
    return nullptr;
  }

  std::string to_csv() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "image,coder,psnr_db,sr,q,h,runtime_s,error\n";
    for (const bench_row& r : rows) {
      os << r.image << ',' << coder_name(r.coder) << ',' << std::fixed << std::setprecision(4) << r.psnr_db << ','
         << r.sr << ',' << r.q << ',' << r.h << ',' << std::setprecision(3) << r.runtime_s << ',' << r.error << '\n';
    }
    return os.str();
  }

  std::string to_table() const {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::left << std::setw(20) << "image" << std::setw(8) << "coder" << std::right << std::setw(10) << "PSNR dB"
       << std::setw(9) << "SR" << std::setw(7) << "Q" << std::setw(7) << "H" << std::setw(10) << "time s" << '\n';
    for (const bench_row& r : rows) {
      os << std::left << std::setw(20) << r.image << std::setw(8) << coder_name(r.coder) << std::right;
      if (!r.ok()) {
        os << "  error: " << r.error << '\n';
        continue;
      }
      os << std::fixed << std::setprecision(2) << std::setw(10) << r.psnr_db << std::setw(9) << r.sr << std::setw(7)
         << r.q << std::setw(7) << r.h << std::setprecision(3) << std::setw(10) << r.runtime_s << '\n';
    }
    return os.str();
  }
};

/// Sparsity benchmark: every image under every coder at a fixed PSNR target
/// with a per-block MSE stop rule. Failures are reported per row. Cells run
/// concurrently; rows come back in (image, coder) order.
inline bench_report bench_table(std::span<const named_image> images, std::span<const coder_kind> coders,
                                double psnr_db = 40.0, std::size_t block = 16, std::size_t redundancy = 2,
                                unsigned threads = 0) {
  bench_report report;
  report.rows.resize(images.size() * coders.size());
  detail::parallel_for(
      report.rows.size(),
      [&](std::size_t cell) {
        const named_image& item = images[cell / coders.size()];
        bench_row& row = report.rows[cell];
        row.image = item.name;
        row.coder = coders[cell % coders.size()];
        try {
          const auto start = std::chrono::steady_clock::now();
          const dictionary dict(coder_params(row.coder, block, redundancy));
          const coded_image coded = code_image(item.image, dict, stop_rule::for_psnr(psnr_db, item.image.bitdepth), 1);
          row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
          row.psnr_db = psnr(item.image, coded.approximation);
          row.q = coded.reps.size();
          row.sr = sparsity_ratio(item.image.width * item.image.height, coded.total_coefficients());
          row.h = plan_fold(coded.reps, true).host_count;
        } catch (const std::exception& e) {
          row.error = e.what();
        }
      },
      threads);
  return report;
}

}  // namespace eif
