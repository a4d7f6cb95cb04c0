#include "nf/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nf {

namespace {

void put_f64_le(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}

void write_doubles(const std::filesystem::path& path, const double* data, std::size_t count,
                   const double* header, std::size_t header_count) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  require(os.good(), errc::io_failure, "cannot open for writing: " + path.string());
  for (std::size_t i = 0; i < header_count; ++i) put_f64_le(os, header[i]);
  for (std::size_t i = 0; i < count; ++i) put_f64_le(os, data[i]);
  require(os.good(), errc::io_failure, "write failed: " + path.string());
}

}  // namespace

void write_field(const std::filesystem::path& data_path, const Field& f,
                 const std::string& role) {
  require(static_cast<bool>(f.grid), errc::bad_argument, "write_field: field has no grid");
  write_doubles(data_path, f.values.data(), f.values.size(), nullptr, 0);

  nlohmann::json sidecar = {
      {"dim", f.grid->dim()},
      {"half_width", f.grid->half_width()},
      {"points_per_dim", f.grid->n()},
      {"role", role},
  };
  std::ofstream os(data_path.string() + ".json", std::ios::trunc);
  require(os.good(), errc::io_failure, "cannot open sidecar for writing: " + data_path.string());
  os << sidecar.dump(2) << "\n";
  require(os.good(), errc::io_failure, "sidecar write failed: " + data_path.string());
}

FieldFile read_field(const std::filesystem::path& data_path) {
  std::ifstream sj(data_path.string() + ".json");
  require(sj.good(), errc::io_failure, "missing sidecar: " + data_path.string() + ".json");
  nlohmann::json sidecar;
  try {
    sj >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    fail(errc::io_failure, "bad sidecar JSON: " + std::string(e.what()));
  }
  GridSpec spec;
  std::string role;
  try {
    spec.dim = sidecar.at("dim").get<int>();
    spec.half_width = sidecar.at("half_width").get<double>();
    spec.points_per_dim = sidecar.at("points_per_dim").get<int>();
    role = sidecar.value("role", "");
  } catch (const nlohmann::json::exception& e) {
    fail(errc::io_failure, "sidecar missing keys: " + std::string(e.what()));
  }
  auto grid = Grid::make(spec);

  std::ifstream is(data_path, std::ios::binary);
  require(is.good(), errc::io_failure, "cannot open: " + data_path.string());
  is.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(is.tellg());
  is.seekg(0);
  require(bytes == grid->size() * 8, errc::io_failure,
          "field payload size does not match sidecar grid: " + data_path.string());
  Field f = make_field(grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = get_f64_le(is);
  require(is.good(), errc::io_failure, "read failed: " + data_path.string());
  return {std::move(f), std::move(role)};
}

void write_matrix(const std::filesystem::path& path, std::size_t rows, std::size_t cols,
                  const std::vector<double>& row_major) {
  require(row_major.size() == rows * cols, errc::bad_argument, "write_matrix: size mismatch");
  const double header[2] = {static_cast<double>(rows), static_cast<double>(cols)};
  write_doubles(path, row_major.data(), row_major.size(), header, 2);
}

void read_matrix(const std::filesystem::path& path, std::size_t& rows, std::size_t& cols,
                 std::vector<double>& row_major) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), errc::io_failure, "cannot open: " + path.string());
  const double r = get_f64_le(is);
  const double c = get_f64_le(is);
  require(is.good() && r > 0 && c > 0 && r == std::floor(r) && c == std::floor(c),
          errc::io_failure, "bad matrix shape header: " + path.string());
  rows = static_cast<std::size_t>(r);
  cols = static_cast<std::size_t>(c);
  row_major.resize(rows * cols);
  for (auto& v : row_major) v = get_f64_le(is);
  require(is.good(), errc::io_failure, "matrix payload truncated: " + path.string());
}

std::vector<SpectrumEntry> read_spectrum_list(const std::filesystem::path& path) {
  std::ifstream is(path);
  require(is.good(), errc::io_failure, "cannot open spectrum list: " + path.string());
  std::vector<SpectrumEntry> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double lambda;
    std::string rel;
    if (!(ls >> lambda)) continue;  // blank or comment-only line
    require(static_cast<bool>(ls >> rel), errc::io_failure,
            "spectrum list line " + std::to_string(line_no) + ": missing field path");
    std::filesystem::path p(rel);
    if (p.is_relative()) p = path.parent_path() / p;
    out.push_back({lambda, p});
  }
  return out;
}

}  // namespace nf
