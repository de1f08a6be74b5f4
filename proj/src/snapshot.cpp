#include "bgkale/snapshot.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>

namespace bgkale {

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

template <int Dim>
void write_csv(const ParticleCloud<Dim>& cloud, std::ostream& os) {
  static constexpr const char* axis[] = {"x", "y", "z"};
  static constexpr const char* vel[] = {"u", "v", "w"};
  for (int a = 0; a < Dim; ++a) os << axis[a] << ",";
  os << "kind,rho,";
  for (int a = 0; a < Dim; ++a) os << vel[a] << ",";
  os << "T\n";

  std::string row;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    row.clear();
    for (int a = 0; a < Dim; ++a) row += format_number(cloud.x[i][a]) + ",";
    row += cloud.is_boundary(i) ? "boundary," : "interior,";
    row += format_number(cloud.rho[i]) + ",";
    for (int a = 0; a < Dim; ++a) row += format_number(cloud.U[i][a]) + ",";
    row += format_number(cloud.T[i]);
    os << row << '\n';
  }
}

template <int Dim>
void write_vtk(const ParticleCloud<Dim>& cloud, std::ostream& os, std::string_view title) {
  const std::size_t n = cloud.size();
  auto xyz = [&](const Vec<Dim>& p) {
    std::string s = format_number(p[0]) + " " + format_number(p[1]) + " ";
    s += Dim == 3 ? format_number(p[Dim - 1]) : std::string("0");
    return s;
  };
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << n << " double\n";
  for (std::size_t i = 0; i < n; ++i) os << xyz(cloud.x[i]) << '\n';
  os << "VERTICES " << n << " " << 2 * n << "\n";
  for (std::size_t i = 0; i < n; ++i) os << "1 " << i << '\n';
  os << "POINT_DATA " << n << "\n";
  os << "SCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < n; ++i) os << format_number(cloud.rho[i]) << '\n';
  os << "SCALARS T double 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < n; ++i) os << format_number(cloud.T[i]) << '\n';
  os << "SCALARS kind int 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < n; ++i) os << (cloud.is_boundary(i) ? 1 : 0) << '\n';
  os << "VECTORS U double\n";
  for (std::size_t i = 0; i < n; ++i) os << xyz(cloud.U[i]) << '\n';
}

template <int Dim>
void write_snapshot(const ParticleCloud<Dim>& cloud, const std::filesystem::path& path,
                    std::string_view format) {
  if (format != "csv" && format != "vtk")
    throw InvalidArgument("unknown snapshot format '" + std::string(format) + "'");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  if (format == "csv")
    write_csv(cloud, out);
  else
    write_vtk(cloud, out, path.filename().string());
  out.flush();
  if (!out) throw IoError(path.string(), "write failed");
}

std::string snapshot_name(int step, std::string_view format) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%06d.", step);
  return std::string(buf) + std::string(format);
}

template void write_csv<2>(const ParticleCloud<2>&, std::ostream&);
template void write_csv<3>(const ParticleCloud<3>&, std::ostream&);
template void write_vtk<2>(const ParticleCloud<2>&, std::ostream&, std::string_view);
template void write_vtk<3>(const ParticleCloud<3>&, std::ostream&, std::string_view);
template void write_snapshot<2>(const ParticleCloud<2>&, const std::filesystem::path&,
                                std::string_view);
template void write_snapshot<3>(const ParticleCloud<3>&, const std::filesystem::path&,
                                std::string_view);

}  // namespace bgkale
