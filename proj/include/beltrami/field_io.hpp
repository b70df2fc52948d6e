#pragma once

#include <filesystem>
#include <iosfwd>

#include "beltrami/field.hpp"

namespace beltrami {

// BFLD binary layout, all little-endian:
//   bytes 0..3   magic "BFLD"
//   u32          version (1)
//   u32          n_side
//   f64          half_width
//   n_side^2 x (f64 re, f64 im), row-major
inline constexpr std::uint32_t kBfldVersion = 1;

/// Thrown on malformed input files or failed writes.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_bfld(std::ostream& out, const ComplexField& field);
ComplexField read_bfld(std::istream& in);

void save_bfld(const std::filesystem::path& path, const ComplexField& field);
ComplexField load_bfld(const std::filesystem::path& path);

/// CSV with header "x,y,re,im", one node per line in row-major order.
void write_csv(std::ostream& out, const ComplexField& field);
void save_csv(const std::filesystem::path& path, const ComplexField& field);

ComplexField to_complex(const RealField& field);

}  // namespace beltrami
