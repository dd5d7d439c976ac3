#ifndef HULLCERT_MAPS_HPP_
#define HULLCERT_MAPS_HPP_

/**
 * @file
 * @brief Smooth maps with Jacobians and smoothness constants, the built-in
 * demo maps, a sampled Lipschitz estimator and a finite-difference Jacobian check.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "hullcert/bounds.hpp"
#include "hullcert/core.hpp"
#include "hullcert/covers.hpp"
#include "hullcert/geometry.hpp"
#include "hullcert/ocp_params.hpp"

namespace hullcert {

struct SmoothMapDescriptor
{
  std::string name;
  Eigen::Index in_dim = 0;
  Eigen::Index out_dim = 0;
  std::function<Vector(const Vector &)> evaluate;
  std::function<Matrix(const Vector &)> jacobian;
  std::optional<SmoothnessConstants> constants;  ///< r is a placeholder until bound to a domain
  bool certified = false;

  Vector operator()(const Vector & x) const { return evaluate(x); }

  /// Applies the map to every point of a cloud.
  VertexCloud apply(const VertexCloud & cloud) const
  {
    Matrix out(out_dim, cloud.size());
    for (Eigen::Index c = 0; c < cloud.size(); ++c) out.col(c) = evaluate(cloud.point(c));
    return VertexCloud(std::move(out));
  }
};

/// The map's constants with r set to the radius of the domain ball.
inline SmoothnessConstants constants_on(const SmoothMapDescriptor & f, const SmoothSetDescriptor & set)
{
  if (!f.constants) throw InvalidArgument("constants_on: map '" + f.name + "' has no declared constants");
  SmoothnessConstants c = *f.constants;
  c.r = set.radius;
  return c;
}

inline SmoothMapDescriptor map_identity(Eigen::Index d)
{
  SmoothMapDescriptor f;
  f.name = "identity";
  f.in_dim = f.out_dim = d;
  f.evaluate = [](const Vector & x) { return x; };
  f.jacobian = [d](const Vector &) { return Matrix(Matrix::Identity(d, d)); };
  f.constants = SmoothnessConstants{1.0, 0.0, 1.0, 1.0, std::nullopt};
  f.certified = true;
  return f;
}

/// (x1, x2) -> (L x1, x2): constants (max(1, L), 0) with inverse constant max(1, 1/L).
inline SmoothMapDescriptor map_scaling(double L)
{
  if (!(L > 0.0)) throw InvalidArgument("map_scaling: L must be positive");
  SmoothMapDescriptor f;
  f.name = "scaling";
  f.in_dim = f.out_dim = 2;
  f.evaluate = [L](const Vector & x) { return Vector(Eigen::Vector2d(L * x(0), x(1))); };
  f.jacobian = [L](const Vector &) { return Matrix(Eigen::Vector2d(L, 1.0).asDiagonal()); };
  f.constants = SmoothnessConstants{std::max(1.0, L), 0.0, std::max(1.0, 1.0 / L), 1.0, std::nullopt};
  f.certified = true;
  return f;
}

/**
 * @brief (rho, theta) -> (rho cos theta, rho sin theta).
 *
 * Constants hold on the annulus rho in [1, 2] only: |J| = max(1, rho) <= 2,
 * |dJ| <= sqrt(1 + rho^2) <= sqrt(5), local inverse constant 1. Demo grade.
 */
inline SmoothMapDescriptor map_polar()
{
  SmoothMapDescriptor f;
  f.name = "polar";
  f.in_dim = f.out_dim = 2;
  f.evaluate = [](const Vector & x) {
    return Vector(Eigen::Vector2d(x(0) * std::cos(x(1)), x(0) * std::sin(x(1))));
  };
  f.jacobian = [](const Vector & x) {
    Matrix J(2, 2);
    J << std::cos(x(1)), -x(0) * std::sin(x(1)), std::sin(x(1)), x(0) * std::cos(x(1));
    return J;
  };
  f.constants = SmoothnessConstants{2.0, std::sqrt(5.0), 1.0, 1.0, std::nullopt};
  f.certified = true;
  return f;
}

/// x = (gamma dM, F1, F2) -> p(t) for fixed piecewise-constant controls (2 x T).
inline SmoothMapDescriptor map_ocp_position(const Matrix & controls, double t, const OcpParams & prm)
{
  prm.validate();
  if (controls.rows() != 2 || controls.cols() != prm.T) {
    throw InvalidArgument("map_ocp_position: controls must be 2 x T");
  }
  if (!(t >= 0.0) || t > prm.T) throw InvalidArgument("map_ocp_position: t outside [0, T]");
  SmoothMapDescriptor f;
  f.name = "ocp_position";
  f.in_dim = 3;
  f.out_dim = 2;
  f.evaluate = [controls, t, prm](const Vector & x) { return Vector(ocp_position(prm, controls, x, t)); };
  f.jacobian = [controls, t, prm](const Vector & x) { return ocp_position_jacobian(prm, controls, x, t); };
  f.constants = prm.constants();
  f.certified = true;
  return f;
}

/// Draws from X itself: the solid ball for balls, the sphere otherwise.
inline Vector sample_set_point(const SmoothSetDescriptor & set, CounterRng & rng)
{
  const auto d = set.ball_dim();
  const Vector u = random_unit_vector(rng, d);
  if (set.kind == SmoothSetDescriptor::Kind::sphere_boundary_only) return set.boundary_point(u);
  const double rad = set.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  return set.embed(set.center + rad * u);
}

/**
 * @brief Sampled lower estimates of the Lipschitz constants of f and df over X.
 *
 * max over random pairs of |f(a) - f(b)| / |a - b| and of the spectral norm
 * ratio for the Jacobians. The result is not a certificate.
 */
inline SmoothnessConstants estimate_lipschitz(
  const SmoothMapDescriptor & f, const SmoothSetDescriptor & set, long pairs, std::uint64_t seed)
{
  if (pairs < 1000) throw InvalidArgument("estimate_lipschitz: pairs must be >= 1000");
  CounterRng rng(seed, 0x4c495053ULL);
  double L = 0.0;
  double H = 0.0;
  for (long k = 0; k < pairs; ++k) {
    const Vector a = sample_set_point(set, rng);
    const Vector b = sample_set_point(set, rng);
    const double dx = (a - b).norm();
    if (!(dx > 0.0)) continue;
    L = std::max(L, (f(a) - f(b)).norm() / dx);
    const Matrix dJ = f.jacobian(a) - f.jacobian(b);
    if (dJ.size() > 0) {
      H = std::max(H, Eigen::JacobiSVD<Matrix>(dJ).singularValues()(0) / dx);
    }
  }
  SmoothnessConstants c;
  c.L_bar = L > 0.0 ? L : 1e-300;
  c.H_bar = H;
  c.r = set.radius;
  return c;
}

/// Central finite-difference Jacobian with step h.
inline Matrix finite_difference_jacobian(const std::function<Vector(const Vector &)> & g, const Vector & x, double h)
{
  const Vector g0 = g(x);
  Matrix J(g0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (g(xp) - g(xm)) / (2.0 * h);
  }
  return J;
}

/// Max over points of |J_fd - J|_F / |J|_F (absolute when J vanishes).
inline double jacobian_check(const SmoothMapDescriptor & f, const VertexCloud & points, double h)
{
  if (!(h >= 1e-8 && h <= 1e-3)) throw InvalidArgument("jacobian_check: h must lie in [1e-8, 1e-3]");
  double worst = 0.0;
  for (Eigen::Index c = 0; c < points.size(); ++c) {
    const Vector x = points.point(c);
    const Matrix J = f.jacobian(x);
    const Matrix Jfd = finite_difference_jacobian(f.evaluate, x, h);
    const double scale = J.norm();
    worst = std::max(worst, (Jfd - J).norm() / (scale > 0.0 ? scale : 1.0));
  }
  return worst;
}

}  // namespace hullcert

#endif  // HULLCERT_MAPS_HPP_
