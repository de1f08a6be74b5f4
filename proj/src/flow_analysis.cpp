#include "bgkale/flow_analysis.hpp"

#include <cmath>
#include <numbers>

#include "bgkale/gfdm.hpp"
#include "bgkale/neighbor_search.hpp"

namespace bgkale {

template <int Dim>
std::vector<Vec<Dim>> sample_velocity(const ParticleCloud<Dim>& cloud,
                                      std::span<const Vec<Dim>> probes) {
  const auto idx = build_voxel_index<Dim>(cloud);
  const std::span<const Vec<Dim>> positions(cloud.x);
  std::vector<Vec<Dim>> out;
  out.reserve(probes.size());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const auto support = idx.ball(positions, probes[p], cloud.h);
    const auto st = build_interpolation<Dim>(positions, probes[p], support, cloud.h, p);
    Vec<Dim> u = Vec<Dim>::Zero();
    for (std::size_t k = 0; k < st.neighbors.size(); ++k)
      u += st.coeffs[static_cast<Eigen::Index>(k)] * cloud.U[st.neighbors[k]];
    out.push_back(u);
  }
  return out;
}

template <int Dim>
std::vector<Vec<Dim>> probe_plane(double L, int per_axis, double margin, int a, int b,
                                  double offset) {
  std::vector<Vec<Dim>> out;
  const double step = per_axis > 1 ? (L - 2.0 * margin) / (per_axis - 1) : 0.0;
  for (int j = 0; j < per_axis; ++j) {
    for (int i = 0; i < per_axis; ++i) {
      Vec<Dim> p = Vec<Dim>::Constant(offset);
      p[a] = margin + i * step;
      p[b] = margin + j * step;
      out.push_back(p);
    }
  }
  return out;
}

template <int Dim>
std::vector<Vec<Dim>> probe_loop(const Vec<Dim>& center, double half, int per_side, int a,
                                 int b) {
  // Corners in counter-clockwise order; each side excludes its end corner.
  const double corners[5][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}, {-1, -1}};
  std::vector<Vec<Dim>> out;
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < per_side; ++k) {
      const double t = static_cast<double>(k) / per_side;
      Vec<Dim> p = center;
      p[a] += half * ((1 - t) * corners[s][0] + t * corners[s + 1][0]);
      p[b] += half * ((1 - t) * corners[s][1] + t * corners[s + 1][1]);
      out.push_back(p);
    }
  }
  return out;
}

template <int Dim>
double winding_number(std::span<const Vec<Dim>> velocity, int a, int b) {
  const std::size_t n = velocity.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& u0 = velocity[k];
    const auto& u1 = velocity[(k + 1) % n];
    double d = std::atan2(u1[b], u1[a]) - std::atan2(u0[b], u0[a]);
    d = std::remainder(d, 2.0 * std::numbers::pi);
    total += d;
  }
  return total / (2.0 * std::numbers::pi);
}

template <int Dim>
double relative_change(std::span<const Vec<Dim>> u0, std::span<const Vec<Dim>> u1) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < u0.size() && k < u1.size(); ++k) {
    diff += (u1[k] - u0[k]).squaredNorm();
    norm += u1[k].squaredNorm();
  }
  return norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
}

template std::vector<Vec<2>> sample_velocity<2>(const ParticleCloud<2>&, std::span<const Vec<2>>);
template std::vector<Vec<3>> sample_velocity<3>(const ParticleCloud<3>&, std::span<const Vec<3>>);
template std::vector<Vec<2>> probe_plane<2>(double, int, double, int, int, double);
template std::vector<Vec<3>> probe_plane<3>(double, int, double, int, int, double);
template std::vector<Vec<2>> probe_loop<2>(const Vec<2>&, double, int, int, int);
template std::vector<Vec<3>> probe_loop<3>(const Vec<3>&, double, int, int, int);
template double winding_number<2>(std::span<const Vec<2>>, int, int);
template double winding_number<3>(std::span<const Vec<3>>, int, int);
template double relative_change<2>(std::span<const Vec<2>>, std::span<const Vec<2>>);
template double relative_change<3>(std::span<const Vec<3>>, std::span<const Vec<3>>);

}  // namespace bgkale
