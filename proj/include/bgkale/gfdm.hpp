#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "bgkale/error.hpp"
#include "bgkale/phase_space.hpp"

namespace bgkale {

/// Shape parameter of the truncated Gaussian weight.
inline constexpr double kWeightShape = 6.0;

/// Normal matrices with lambda_min < tol * lambda_max are treated as singular.
inline constexpr double kSingularityTolerance = 1e-12;

/// exp(-6 dist^2 / h^2) inside the closed ball of radius h, zero outside.
template <typename Scalar>
Scalar weight(Scalar dist, Scalar h) {
  const Scalar q = dist / h;
  return q <= Scalar(1) ? std::exp(-Scalar(kWeightShape) * q * q) : Scalar(0);
}

/// Weighted least-squares gradient operator at one particle, together with the
/// per-neighbor rotated frames used by the positive upwind flux.
///
/// For neighbor j with offset d_j and weight w_j:
///   deriv_coeffs.col(j) = w_j S d_j,       S = (M^T W M)^{-1}
///   frame(j)            = rows (n, t[, b]), n = d_j / |d_j|
///   rotated.col(j)      = frame(j) * deriv_coeffs.col(j)
/// The first rotated coefficient is w_j d_j^T S d_j / |d_j| > 0 for any
/// non-deficient operator.
template <int Dim>
struct LsOperator {
  using Frame = Eigen::Matrix<double, Dim, Dim, Eigen::RowMajor>;

  std::size_t center = 0;
  std::vector<int> neighbors;
  Eigen::VectorXd weights;
  Eigen::Matrix<double, Dim, Eigen::Dynamic> offsets;
  Eigen::Matrix<double, Dim, Dim> S;
  Eigen::Matrix<double, Dim, Eigen::Dynamic> deriv_coeffs;
  Eigen::Matrix<double, Dim * Dim, Eigen::Dynamic> frames;
  Eigen::Matrix<double, Dim, Eigen::Dynamic> rotated;

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(neighbors.size()); }
  Eigen::Map<const Frame> frame(Eigen::Index j) const {
    return Eigen::Map<const Frame>(frames.col(j).data());
  }
};

/// Orthonormal right-handed frame with first row along d.
/// 2D: n = (cos phi, sin phi), t = (-sin phi, cos phi).
/// 3D: rows (sin th cos ph, sin th sin ph, cos th), (cos th cos ph, cos th sin ph, -sin th),
///     (-sin ph, cos ph, 0) with ph = atan2(dy, dx), th = acos(dz / r).
template <int Dim>
typename LsOperator<Dim>::Frame neighbor_frame(const Vec<Dim>& d) {
  typename LsOperator<Dim>::Frame A;
  const double phi = std::atan2(d[1], d[0]);
  const double cp = std::cos(phi), sp = std::sin(phi);
  if constexpr (Dim == 2) {
    A << cp, sp, -sp, cp;
  } else {
    const double r = d.norm();
    const double theta = std::acos(std::clamp(d[2] / r, -1.0, 1.0));
    const double ct = std::cos(theta), st = std::sin(theta);
    A << st * cp, st * sp, ct, ct * cp, ct * sp, -st, -sp, cp, 0.0;
  }
  return A;
}

template <typename Matrix>
bool nearly_singular(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double hi = ev.maxCoeff();
  return !(hi > 0.0) || ev.minCoeff() < kSingularityTolerance * hi;
}

/// Throws DeficientStencil when fewer than Dim + 2 neighbors carry weight or
/// M^T W M is singular.
template <int Dim>
LsOperator<Dim> build_ls_operator(std::span<const Vec<Dim>> positions, std::size_t i,
                                  std::span<const int> neighbors, double h) {
  LsOperator<Dim> op;
  op.center = i;
  op.neighbors.reserve(neighbors.size());
  std::vector<double> w;
  w.reserve(neighbors.size());
  for (int j : neighbors) {
    const double wj = weight((positions[j] - positions[i]).norm(), h);
    if (wj > 0.0 && static_cast<std::size_t>(j) != i) {
      op.neighbors.push_back(j);
      w.push_back(wj);
    }
  }
  const auto m = op.size();
  if (m < Dim + 2)
    throw DeficientStencil(i, std::to_string(m) + " weighted neighbors");

  op.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), m);
  op.offsets.resize(Dim, m);
  for (Eigen::Index j = 0; j < m; ++j) op.offsets.col(j) = positions[op.neighbors[j]] - positions[i];

  const Eigen::Matrix<double, Dim, Dim> normal =
      op.offsets * op.weights.asDiagonal() * op.offsets.transpose();
  if (nearly_singular(normal)) throw DeficientStencil(i, "singular normal matrix");
  op.S = normal.inverse();

  op.deriv_coeffs = op.S * op.offsets * op.weights.asDiagonal();
  op.frames.resize(Dim * Dim, m);
  op.rotated.resize(Dim, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const auto A = neighbor_frame<Dim>(op.offsets.col(j));
    Eigen::Map<typename LsOperator<Dim>::Frame>(op.frames.col(j).data()) = A;
    op.rotated.col(j) = A * op.deriv_coeffs.col(j);
  }
  return op;
}

/// grad_k = sum_j deriv_coeffs(k, j) (f_j - f_center).
template <int Dim>
Vec<Dim> gradient(const LsOperator<Dim>& op, double f_center,
                  const Eigen::Ref<const Eigen::VectorXd>& f_neighbors) {
  return op.deriv_coeffs * (f_neighbors.array() - f_center).matrix();
}

/// Nonnegative per-neighbor coefficients K_j of the positive upwind flux,
///   Q = -sum_j K_j (f_j - f_i),
///   K_j = -abar_j (c.n - |c.n|) - sum_{e in t[, b]} (rbar_j c.e - |rbar_j| |c.e|),
/// evaluated as -2 sum_a min(0, r_a (A c)_a) so that K_j >= 0 holds exactly in
/// floating point (abar_j = r_0 > 0).
template <int Dim>
Eigen::VectorXd upwind_coefficients(const LsOperator<Dim>& op, const Vec<Dim>& c) {
  Eigen::VectorXd K(op.size());
  for (Eigen::Index j = 0; j < op.size(); ++j) {
    const Vec<Dim> cr = op.frame(j) * c;
    const auto& r = op.rotated.col(j);
    double k = 0.0;
    for (int a = 0; a < Dim; ++a) k += std::min(0.0, r[a] * cr[a]);
    K[j] = -2.0 * k;
  }
  return K;
}

/// Positive upwind approximation of c . grad f at the operator's center.
template <int Dim>
double upwind_flux(const LsOperator<Dim>& op, const Vec<Dim>& c, double f_center,
                   const Eigen::Ref<const Eigen::VectorXd>& f_neighbors) {
  return -upwind_coefficients(op, c).dot((f_neighbors.array() - f_center).matrix());
}

inline double upwind_flux_2d(const LsOperator<2>& op, const Vec<2>& c, double f_center,
                             const Eigen::Ref<const Eigen::VectorXd>& f_neighbors) {
  return upwind_flux<2>(op, c, f_center, f_neighbors);
}

inline double upwind_flux_3d(const LsOperator<3>& op, const Vec<3>& c, double f_center,
                             const Eigen::Ref<const Eigen::VectorXd>& f_neighbors) {
  return upwind_flux<3>(op, c, f_center, f_neighbors);
}

/// Largest dt for which f - dt Q is a convex combination of f_i and its neighbors.
template <int Dim>
double stable_dt(const LsOperator<Dim>& op, const Vec<Dim>& c) {
  const double s = upwind_coefficients(op, c).sum();
  return s > 0.0 ? 1.0 / s : std::numeric_limits<double>::infinity();
}

/// Linear weights c_j of a weighted least-squares fit f ~ a0 + a.(x - target):
/// a0 = sum_j c_j f_j.
struct InterpolationStencil {
  std::vector<int> neighbors;
  Eigen::VectorXd coeffs;

  template <typename ValueOf>
  double apply(ValueOf&& value_of) const {
    double s = 0.0;
    for (std::size_t j = 0; j < neighbors.size(); ++j)
      s += coeffs[static_cast<Eigen::Index>(j)] * value_of(neighbors[j]);
    return s;
  }
};

/// Offsets are scaled by h so the rank test compares like-dimensioned columns.
/// `tag` is reported in the DeficientStencil error.
template <int Dim>
InterpolationStencil build_interpolation(std::span<const Vec<Dim>> positions,
                                         const Vec<Dim>& target, std::span<const int> neighbors,
                                         double h, std::size_t tag = 0) {
  InterpolationStencil st;
  std::vector<double> w;
  for (int j : neighbors) {
    const double wj = weight((positions[j] - target).norm(), h);
    if (wj > 0.0) {
      st.neighbors.push_back(j);
      w.push_back(wj);
    }
  }
  const auto m = static_cast<Eigen::Index>(st.neighbors.size());
  if (m < Dim + 2) throw DeficientStencil(tag, std::to_string(m) + " interpolation neighbors");

  Eigen::Matrix<double, Dim + 1, Eigen::Dynamic> P(Dim + 1, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    P(0, j) = 1.0;
    P.template bottomRows<Dim>().col(j) = (positions[st.neighbors[j]] - target) / h;
  }
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), m);
  const Eigen::Matrix<double, Dim + 1, Dim + 1> normal = P * wv.asDiagonal() * P.transpose();
  if (nearly_singular(normal)) throw DeficientStencil(tag, "singular interpolation system");

  const Eigen::Matrix<double, Dim + 1, 1> y =
      normal.ldlt().solve(Eigen::Matrix<double, Dim + 1, 1>::Unit(0));
  st.coeffs = wv.cwiseProduct(P.transpose() * y);
  return st;
}

template <int Dim>
double interpolate_value(std::span<const Vec<Dim>> positions, const Vec<Dim>& target,
                         std::span<const int> neighbors,
                         const Eigen::Ref<const Eigen::VectorXd>& f_neighbors, double h) {
  if (f_neighbors.size() != static_cast<Eigen::Index>(neighbors.size()))
    throw ContractViolation("interpolate_value: one value per neighbor expected");
  const auto st = build_interpolation<Dim>(positions, target, neighbors, h);
  // f_neighbors is aligned with `neighbors`; map surviving indices back to it.
  double s = 0.0;
  std::size_t k = 0;
  for (std::size_t j = 0; j < neighbors.size() && k < st.neighbors.size(); ++j) {
    if (neighbors[j] == st.neighbors[k]) {
      s += st.coeffs[static_cast<Eigen::Index>(k)] * f_neighbors[static_cast<Eigen::Index>(j)];
      ++k;
    }
  }
  return s;
}

}  // namespace bgkale
