// eif: fold/unfold grayscale images into their own sparse-representation
// null space, and benchmark sparsity of the RDC-DB dictionary against block DCT.

#include <eif/eif.hpp>

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

std::uint64_t parse_hex64(const std::string& text, const char* what) {
  std::string_view digits = text;
  if (digits.starts_with("0x") || digits.starts_with("0X")) digits.remove_prefix(2);
  if (digits.empty() || digits.size() > 16)
    eif::fail(eif::errc::invalid_argument, std::string(what) + " must be 1 to 16 hex digits");
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, 16);
  if (ec != std::errc() || end != digits.data() + digits.size())
    eif::fail(eif::errc::invalid_argument, std::string(what) + " is not hexadecimal: " + text);
  return value;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

eif::coder_kind parse_coder(const std::string& name) {
  if (name == "rdcdb") return eif::coder_kind::rdcdb;
  if (name == "dct") return eif::coder_kind::dct;
  eif::fail(eif::errc::invalid_argument, "unknown coder '" + name + "' (expected dct or rdcdb)");
}

struct fold_args {
  std::string input, output, key, seed = "0", coder = "rdcdb";
  double psnr = 40.0;
  std::size_t block = 8, redundancy = 2;
  unsigned threads = 0;
};

int run_fold(const fold_args& a) {
  const std::uint64_t key = parse_hex64(a.key, "--key");
  const std::uint64_t seed = parse_hex64(a.seed, "--seed");
  const eif::gray_image image = eif::load_pgm(a.input);
  const eif::dictionary dict(eif::coder_params(parse_coder(a.coder), a.block, a.redundancy));
  const eif::folded_image folded =
      eif::fold(image, dict, eif::stop_rule::for_psnr(a.psnr, image.bitdepth), key, seed, {false, a.threads});
  eif::write_file(a.output, eif::write_container(folded));
  std::cout << "folded " << folded.q_total() << " blocks into " << folded.host_count << " hosts ("
            << folded.total_atoms() << " coefficients)\n";
  return 0;
}

int run_unfold(const std::string& input, const std::string& output, const std::string& key_text, unsigned threads) {
  const std::uint64_t key = parse_hex64(key_text, "--key");
  const eif::folded_image folded = eif::read_container(eif::read_file(input));
  const eif::dictionary dict(folded.dict);
  eif::save_pgm(output, eif::unfold(folded, dict, key, threads));
  return 0;
}

int run_info(const std::string& input) {
  const eif::folded_image f = eif::read_container(eif::read_file(input));
  const std::size_t pixels = f.width * f.height;
  std::cout << "format:      EIF1 v" << eif::container_version << '\n'
            << "image:       " << f.width << "x" << f.height << ", " << f.bitdepth << "-bit\n"
            << "coder:       " << (f.dict.with_dirac ? "rdcdb" : "dct") << " (n=" << f.dict.n << ", m=" << f.dict.m
            << ", redundancy=" << f.dict.redundancy() << ")\n"
            << "Q:           " << f.q_total() << '\n'
            << "H:           " << f.host_count << '\n'
            << "atoms:       " << f.total_atoms() << '\n'
            << "SR:          ";
  if (f.total_atoms() == 0) {
    std::cout << "undefined (no coefficients)\n";
  } else {
    std::cout << eif::sparsity_ratio(pixels, f.total_atoms()) << '\n';
  }
  std::cout << "stop rule:   ";
  switch (f.stop.mode) {
    case eif::stop_rule::kind::target_block_mse: std::cout << "block MSE <= " << f.stop.target_mse; break;
    case eif::stop_rule::kind::max_atoms: std::cout << "at most " << f.stop.max_atoms << " atoms"; break;
    case eif::stop_rule::kind::residual_tol: std::cout << "residual <= " << f.stop.residual_tol; break;
  }
  std::cout << '\n' << "seed root:   " << hex64(f.seed_root) << '\n' << "host seeds:\n";
  for (std::size_t h = 0; h < f.seeds.size(); ++h) std::cout << "  " << h << ' ' << hex64(f.seeds[h]) << '\n';
  return 0;
}

struct bench_args {
  std::string dir, csv;
  std::vector<std::string> coders{"rdcdb", "dct"};
  double psnr = 40.0;
  std::size_t block = 16, redundancy = 2;
  unsigned threads = 0;
};

int run_bench(const bench_args& a) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(a.dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) eif::fail(eif::errc::io, "no .pgm files in " + a.dir);

  std::vector<eif::named_image> images;
  for (const auto& f : files) images.push_back({f.stem().string(), eif::load_pgm(f)});
  std::vector<eif::coder_kind> coders;
  for (const auto& c : a.coders) coders.push_back(parse_coder(c));

  const eif::bench_report report = eif::bench_table(images, coders, a.psnr, a.block, a.redundancy, a.threads);
  std::cout << report.to_table();
  if (!a.csv.empty()) {
    const std::string csv = report.to_csv();
    if (a.csv == "-") {
      std::cout << '\n' << csv;
    } else {
      eif::write_file(a.csv, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
    }
  }
  const bool all_ok = std::all_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.ok(); });
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encrypted image folding over sparse RDC-DB / DCT representations"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = all cores)");

  fold_args fa;
  auto* fold = app.add_subcommand("fold", "Fold a PGM image into an .eif container");
  fold->add_option("input", fa.input, "Input PGM (P5)")->required()->check(CLI::ExistingFile);
  fold->add_option("output", fa.output, "Output .eif container")->required();
  fold->add_option("--psnr", fa.psnr, "Target PSNR in dB")->capture_default_str();
  fold->add_option("--block", fa.block, "Block side n")->capture_default_str();
  fold->add_option("--redundancy", fa.redundancy, "Cosine redundancy (m = redundancy * n)")->capture_default_str();
  fold->add_option("--key", fa.key, "Secret key, up to 16 hex digits")->required();
  fold->add_option("--seed", fa.seed, "Public seed root, up to 16 hex digits")->capture_default_str();
  fold->add_option("--coder", fa.coder, "rdcdb or dct")->capture_default_str();

  std::string unfold_in, unfold_out, unfold_key;
  auto* unfold = app.add_subcommand("unfold", "Unfold an .eif container back into a PGM image");
  unfold->add_option("input", unfold_in, "Input .eif container")->required()->check(CLI::ExistingFile);
  unfold->add_option("output", unfold_out, "Output PGM")->required();
  unfold->add_option("--key", unfold_key, "Secret key, up to 16 hex digits")->required();

  bench_args ba;
  auto* bench = app.add_subcommand("bench", "Sparsity ratio benchmark over a directory of PGM images");
  bench->add_option("dir", ba.dir, "Directory of .pgm images")->required()->check(CLI::ExistingDirectory);
  bench->add_option("--psnr", ba.psnr, "Target PSNR in dB")->capture_default_str();
  bench->add_option("--block", ba.block, "Block side n")->capture_default_str();
  bench->add_option("--redundancy", ba.redundancy, "Cosine redundancy of the RDC-DB coder")->capture_default_str();
  bench->add_option("--coder", ba.coders, "Coders to run (rdcdb, dct)")->capture_default_str();
  bench->add_option("--csv", ba.csv, "Write the report as CSV to this file ('-' for stdout)");

  std::string info_in;
  auto* info = app.add_subcommand("info", "Print the header of an .eif container");
  info->add_option("input", info_in, "Input .eif container")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    fa.threads = threads;
    ba.threads = threads;
    if (*fold) return run_fold(fa);
    if (*unfold) return run_unfold(unfold_in, unfold_out, unfold_key, threads);
    if (*bench) return run_bench(ba);
    if (*info) return run_info(info_in);
  } catch (const eif::error& e) {
    std::cerr << "eif: " << e.what() << '\n';
    return 2 + static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "eif: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
