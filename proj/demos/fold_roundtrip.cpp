// Folds a PGM image, unfolds it with the right and a wrong key, and prints
// what each reader gets back.
//
//   fold_roundtrip image.pgm [psnr]

#include <eif/eif.hpp>

#include <cstdio>
#include <cstdlib>
#include <exception>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s image.pgm [psnr]\n", argv[0]);
    return 2;
  }
  try {
    const eif::gray_image image = eif::load_pgm(argv[1]);
    const double target = argc > 2 ? std::atof(argv[2]) : 40.0;
    const eif::dictionary dict(eif::rdcdb_params(8));
    const std::uint64_t key = 0x0123456789abcdef, seed = 42;

    const eif::folded_image folded = eif::fold(image, dict, eif::stop_rule::for_psnr(target, image.bitdepth), key, seed);
    const auto bytes = eif::write_container(folded);
    std::printf("%zu blocks, %zu hosts, %zu coefficients, container %zu bytes\n", folded.q_total(), folded.host_count,
                folded.total_atoms(), bytes.size());
    std::printf("sparsity ratio %.2f\n", eif::sparsity_ratio(image.width * image.height, folded.total_atoms()));

    const eif::folded_image stored = eif::read_container(bytes);
    std::printf("right key: %.2f dB\n", eif::psnr(image, eif::unfold(stored, dict, key)));
    std::printf("wrong key: %.2f dB\n", eif::psnr(image, eif::unfold(stored, dict, key ^ 1)));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }
  return 0;
}
