#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eif {

enum class errc {
  invalid_argument,
  shape_mismatch,
  out_of_range,
  capacity,
  not_foldable,
  basis_exhausted,
  undefined,
  malformed,
  unsupported_format,
  truncated,
  bad_magic,
  version_mismatch,
  length_mismatch,
  dictionary_mismatch,
  io,
};

constexpr std::string_view errc_name(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "invalid argument";
    case errc::shape_mismatch: return "shape mismatch";
    case errc::out_of_range: return "index out of range";
    case errc::capacity: return "capacity exceeded";
    case errc::not_foldable: return "image not foldable";
    case errc::basis_exhausted: return "null-space basis exhausted";
    case errc::undefined: return "undefined quantity";
    case errc::malformed: return "malformed input";
    case errc::unsupported_format: return "unsupported format";
    case errc::truncated: return "truncated input";
    case errc::bad_magic: return "bad magic";
    case errc::version_mismatch: return "version mismatch";
    case errc::length_mismatch: return "length mismatch";
    case errc::dictionary_mismatch: return "dictionary mismatch";
    case errc::io: return "i/o error";
  }
  return "unknown error";
}

// Every failure raised by the library is an eif::error carrying a code.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace eif
