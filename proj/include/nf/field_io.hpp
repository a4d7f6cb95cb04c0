#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nf/grid.hpp"

namespace nf {

// On-disk formats.
//
// Field: raw little-endian float64, row-major, at `data_path`; a JSON sidecar
// at `data_path + ".json"` records {dim, half_width, points_per_dim, role}.
// Round-trips are bit-exact.
//
// Matrix (dense kernels): same raw float64 stream prefixed by a 2-entry shape
// header (rows, cols), row-major payload.
//
// Spectrum list: text file, one `<lambda> <field-path>` pair per line,
// '#' comments and blank lines ignored; relative paths resolve against the
// list file's directory.

struct FieldFile {
  Field field;
  std::string role;
};

void write_field(const std::filesystem::path& data_path, const Field& f,
                 const std::string& role);
FieldFile read_field(const std::filesystem::path& data_path);

void write_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                  const std::vector<double>& row_major);
void read_matrix(const std::filesystem::path& path, std::size_t& rows, std::size_t& cols,
                 std::vector<double>& row_major);

struct SpectrumEntry {
  double lambda;
  std::filesystem::path field_path;
};

std::vector<SpectrumEntry> read_spectrum_list(const std::filesystem::path& path);

}  // namespace nf
