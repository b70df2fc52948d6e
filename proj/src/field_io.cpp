#include "beltrami/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace beltrami {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<unsigned char, sizeof(U)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(U));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(U));
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(U))) {
    throw FormatError("BFLD: unexpected end of data");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  U value;
  std::memcpy(&value, bytes.data(), sizeof(U));
  return value;
}

}  // namespace

void write_bfld(std::ostream& out, const ComplexField& field) {
  out.write("BFLD", 4);
  put_le<std::uint32_t>(out, kBfldVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(field.grid().n_side()));
  put_le<double>(out, field.grid().half_width());
  for (const cplx& v : field.samples()) {
    put_le<double>(out, v.real());
    put_le<double>(out, v.imag());
  }
  if (!out) throw FormatError("BFLD: write failed");
}

ComplexField read_bfld(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "BFLD", 4) != 0) throw FormatError("BFLD: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kBfldVersion) throw FormatError("BFLD: unsupported version " + std::to_string(version));
  const auto n_side = get_le<std::uint32_t>(in);
  const auto half_width = get_le<double>(in);
  GridSpec grid;
  try {
    grid = GridSpec(n_side, half_width);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("BFLD: invalid grid header: ") + e.what());
  }
  std::vector<cplx> samples(grid.size());
  for (cplx& v : samples) {
    const double re = get_le<double>(in);
    const double im = get_le<double>(in);
    v = {re, im};
  }
  return ComplexField(grid, std::move(samples));
}

void save_bfld(const std::filesystem::path& path, const ComplexField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_bfld(out, field);
}

ComplexField load_bfld(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_bfld(in);
}

void write_csv(std::ostream& out, const ComplexField& field) {
  const GridSpec& grid = field.grid();
  out << "x,y,re,im\n" << std::setprecision(17);
  for (std::size_t idx = 0; idx < field.size(); ++idx) {
    const cplx z = grid.node(idx);
    out << z.real() << ',' << z.imag() << ',' << field[idx].real() << ',' << field[idx].imag() << '\n';
  }
  if (!out) throw FormatError("CSV: write failed");
}

void save_csv(const std::filesystem::path& path, const ComplexField& field) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  write_csv(out, field);
}

ComplexField to_complex(const RealField& field) {
  ComplexField out(field.grid());
  for (std::size_t i = 0; i < field.size(); ++i) out[i] = field[i];
  return out;
}

}  // namespace beltrami
