#ifndef HULLCERT_OCP_PARAMS_HPP_
#define HULLCERT_OCP_PARAMS_HPP_

/**
 * @file
 * @brief Planar spacecraft planning problem with uncertain mass and constant
 * disturbance, and the closed-form position map of its double-integrator
 * dynamics under piecewise-constant controls.
 *
 * Uncertain inputs are x = (gamma * dM, F1, F2), where 1/m = M_bar + dM.
 * They are enclosed in the ball B(0, sqrt(2) F_max).
 */

#include <algorithm>
#include <cmath>

#include "hullcert/bounds.hpp"
#include "hullcert/core.hpp"

namespace hullcert {

struct OcpParams
{
  int T = 30;  ///< horizon in seconds; controls are constant on unit intervals
  double u_max = 0.2;
  double F_max = 0.005;
  double mass_min = 30.0;
  double mass_max = 34.0;
  double gamma = 9.0 / 4.0;
  double M_bar = 1.0 / 32.0;
  Eigen::Vector2d n1 = Eigen::Vector2d(1.0, -5.0).normalized();
  Eigen::Vector2d c1 = Eigen::Vector2d(0.0, -0.1);
  Eigen::Vector2d n2 = Eigen::Vector2d(-1.0, -5.0).normalized();
  Eigen::Vector2d c2 = Eigen::Vector2d(2.0, -0.1);
  int switch_time = 20;  ///< obstacle 1 on [0, switch_time), obstacle 2 on [switch_time, T]
  Eigen::Vector2d p_goal = Eigen::Vector2d(2.0, 0.05);
  Eigen::Vector2d dp_goal = Eigen::Vector2d(0.3, 0.14);
  Eigen::Vector2d p0 = Eigen::Vector2d::Zero();
  Eigen::Vector2d v0 = Eigen::Vector2d::Zero();

  void validate() const
  {
    if (T < 1) throw InvalidArgument("OcpParams: T must be >= 1");
    if (!(u_max > 0.0) || !(F_max >= 0.0) || !(gamma > 0.0) || !(M_bar > 0.0)) {
      throw InvalidArgument("OcpParams: u_max, gamma, M_bar must be positive and F_max non-negative");
    }
    if (!(mass_min > 0.0) || mass_max < mass_min) throw InvalidArgument("OcpParams: bad mass range");
    if (switch_time < 0 || switch_time > T) throw InvalidArgument("OcpParams: switch_time outside [0, T]");
    if (!(dp_goal.array() > 0.0).all()) throw InvalidArgument("OcpParams: goal half-widths must be positive");
  }

  /// Radius of the ball enclosing (gamma * dM, F).
  double radius() const { return std::sqrt(2.0) * F_max; }

  /// Largest inverse mass, 1 / mass_min.
  double M_max() const { return 1.0 / mass_min; }

  /// Lipschitz constant of x -> p(t), uniform over t in [0, T].
  double lipschitz_L() const
  {
    const double t2 = static_cast<double>(T) * T;
    return t2 / (std::sqrt(2.0) * gamma) * std::max(gamma * M_max() + F_max, u_max + F_max);
  }

  /// Lipschitz constant of x -> dp(t), uniform over t in [0, T].
  double lipschitz_H() const { return static_cast<double>(T) * T / (2.0 * gamma); }

  SmoothnessConstants constants() const
  {
    SmoothnessConstants c;
    c.L_bar = lipschitz_L();
    c.H_bar = lipschitz_H();
    c.r = radius() > 0.0 ? radius() : 1.0;
    return c;
  }
};

/// Position p(t) and its affine dependence on the stacked controls, p = offset + B u.
struct AffineInControls
{
  Eigen::Vector2d offset;
  Matrix B;  ///< 2 x (2T)
};

namespace detail {

inline void split_time(const OcpParams & prm, double t, int & s, double & dt)
{
  if (!(t >= 0.0) || t > prm.T) throw InvalidArgument("ocp position: t outside [0, T]");
  s = static_cast<int>(std::floor(t));
  dt = t - s;
  if (s >= prm.T) {
    s = prm.T;
    dt = 0.0;
  }
}

}  // namespace detail

/**
 * @brief p(t) = p0 + v0 t + (M/2) (F t^2 + sum_{k<s} u_k (2(t-k) - 1) + u_s dt^2)
 * with t = s + dt and M = M_bar + x_0 / gamma, as an affine function of the
 * stacked controls (u_0, ..., u_{T-1}).
 */
inline AffineInControls ocp_position_affine(const OcpParams & prm, const Vector & x, double t)
{
  int s = 0;
  double dt = 0.0;
  detail::split_time(prm, t, s, dt);
  const double Minv = prm.M_bar + x(0) / prm.gamma;
  const Eigen::Vector2d F(x(1), x(2));
  AffineInControls out;
  out.offset = prm.p0 + prm.v0 * t + 0.5 * Minv * t * t * F;
  out.B = Matrix::Zero(2, 2 * prm.T);
  for (int k = 0; k < s; ++k) {
    out.B.block<2, 2>(0, 2 * k) = Eigen::Matrix2d::Identity() * (0.5 * Minv * (2.0 * (t - k) - 1.0));
  }
  if (s < prm.T && dt > 0.0) out.B.block<2, 2>(0, 2 * s) = Eigen::Matrix2d::Identity() * (0.5 * Minv * dt * dt);
  return out;
}

/// Controls stored as a 2 x T matrix, column k acting on [k, k+1).
inline Eigen::Vector2d ocp_position(const OcpParams & prm, const Matrix & controls, const Vector & x, double t)
{
  const auto a = ocp_position_affine(prm, x, t);
  const Eigen::Map<const Vector> u(controls.data(), controls.size());
  return a.offset + a.B * u;
}

/// Jacobian of x -> p(t): first column (1 / 2 gamma)(F t^2 + control sum), F-block (M t^2 / 2) I.
inline Matrix ocp_position_jacobian(const OcpParams & prm, const Matrix & controls, const Vector & x, double t)
{
  int s = 0;
  double dt = 0.0;
  detail::split_time(prm, t, s, dt);
  Eigen::Vector2d drive = Eigen::Vector2d(x(1), x(2)) * t * t;
  for (int k = 0; k < s; ++k) drive += controls.col(k) * (2.0 * (t - k) - 1.0);
  if (s < prm.T && dt > 0.0) drive += controls.col(s) * dt * dt;
  const double Minv = prm.M_bar + x(0) / prm.gamma;
  Matrix J(2, 3);
  J.col(0) = drive / (2.0 * prm.gamma);
  J.block<2, 2>(0, 1) = Eigen::Matrix2d::Identity() * (0.5 * Minv * t * t);
  return J;
}

}  // namespace hullcert

#endif  // HULLCERT_OCP_PARAMS_HPP_
