#ifndef HULLCERT_REACHABILITY_HPP_
#define HULLCERT_REACHABILITY_HPP_

/**
 * @file
 * @brief Fixed-step RK4 flows of uncertain ODEs, variational Jacobians and
 * reachable-hull estimates from boundary covers of the uncertainty set.
 */

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "hullcert/bounds.hpp"
#include "hullcert/core.hpp"
#include "hullcert/covers.hpp"
#include "hullcert/geometry.hpp"
#include "hullcert/maps.hpp"
#include "hullcert/ocp_params.hpp"

namespace hullcert {

/// Piecewise-constant signal: column k of `values` acts on [k * interval, (k+1) * interval).
struct ControlSchedule
{
  double interval = 1.0;
  Matrix values;  ///< m x K

  Eigen::Index dim() const { return values.rows(); }

  Vector at(double t) const
  {
    if (values.cols() == 0) return Vector::Zero(values.rows());
    auto k = static_cast<Eigen::Index>(std::floor(t / interval));
    k = std::clamp<Eigen::Index>(k, 0, values.cols() - 1);
    return values.col(k);
  }
};

/**
 * @brief x' = f(x, theta, u(t), t) with uncertain (x0, theta).
 *
 * Cover coordinates z map to (x0, theta) = base + embed * z, which lets a
 * cover live on a subset of the initial-state/parameter coordinates.
 */
struct OdeSystem
{
  using Field = std::function<Vector(const Vector &, const Vector &, const Vector &, double)>;
  using FieldJacobian = std::function<Matrix(const Vector &, const Vector &, const Vector &, double)>;

  std::string name;
  Eigen::Index n = 0;  ///< state dimension
  Eigen::Index p = 0;  ///< parameter dimension
  Field f;
  FieldJacobian dfdx;      ///< optional, finite differences otherwise
  FieldJacobian dfdtheta;  ///< optional, finite differences otherwise
  ControlSchedule controls;
  SmoothSetDescriptor parameters;  ///< set X in cover coordinates
  Vector base;                     ///< (n + p)
  Matrix embed;                    ///< (n + p) x dim(X)
  std::vector<Eigen::Index> output;  ///< projected state coordinates; empty means the full state
  std::optional<SmoothnessConstants> flow_constants;
  bool constants_certified = false;

  std::pair<Vector, Vector> lift(const Vector & z) const
  {
    const Vector w = base + embed * z;
    return {w.head(n), w.tail(p)};
  }

  Eigen::Index output_dim() const { return output.empty() ? n : static_cast<Eigen::Index>(output.size()); }

  Vector project(const Vector & x) const
  {
    if (output.empty()) return x;
    Vector y(static_cast<Eigen::Index>(output.size()));
    for (std::size_t i = 0; i < output.size(); ++i) y(static_cast<Eigen::Index>(i)) = x(output[i]);
    return y;
  }

  Matrix project_rows(const Matrix & J) const
  {
    if (output.empty()) return J;
    Matrix out(static_cast<Eigen::Index>(output.size()), J.cols());
    for (std::size_t i = 0; i < output.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = J.row(output[i]);
    return out;
  }
};

struct FlowResult
{
  Vector state;
  std::vector<double> times;       ///< filled when a trajectory is recorded
  std::vector<Vector> trajectory;  ///< states at `times`
  Matrix jacobian;                 ///< n x (n + p) sensitivity to (x0, theta); empty for plain RK4
};

/// The state stopped being finite at `time`.
class IntegrationError : public NumericalError
{
public:
  explicit IntegrationError(double time)
      : NumericalError("integration blew up at t = " + std::to_string(time)), time_(time)
  {}
  double time() const { return time_; }

private:
  double time_;
};

namespace detail {

inline void check_grid(const OdeSystem & sys, double T, int steps)
{
  if (steps < 1) throw InvalidArgument("integrate: steps must be >= 1");
  if (!(T > 0.0)) throw InvalidArgument("integrate: T must be positive");
  if (sys.controls.values.cols() > 0) {
    const double ratio = sys.controls.interval / (T / steps);
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || std::round(ratio) < 1.0) {
      throw InvalidArgument("integrate: control breakpoints are not aligned with the step grid");
    }
  }
}

inline Matrix fd_state_jacobian(const OdeSystem & sys, const Vector & x, const Vector & th, const Vector & u, double t)
{
  Matrix J(sys.n, sys.n);
  for (Eigen::Index i = 0; i < sys.n; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (sys.f(xp, th, u, t) - sys.f(xm, th, u, t)) / (2.0 * h);
  }
  return J;
}

inline Matrix fd_param_jacobian(const OdeSystem & sys, const Vector & x, const Vector & th, const Vector & u, double t)
{
  Matrix J(sys.n, sys.p);
  for (Eigen::Index i = 0; i < sys.p; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(th(i)));
    Vector tp = th;
    Vector tm = th;
    tp(i) += h;
    tm(i) -= h;
    J.col(i) = (sys.f(x, tp, u, t) - sys.f(x, tm, u, t)) / (2.0 * h);
  }
  return J;
}

}  // namespace detail

/// Classical RK4 with h = T / steps; controls are frozen on each step.
inline FlowResult integrate_rk4(
  const OdeSystem & sys, const Vector & x0, const Vector & theta, double T, int steps, bool record = false)
{
  detail::check_grid(sys, T, steps);
  const double h = T / steps;
  Vector x = x0;
  FlowResult res;
  if (record) {
    res.times.push_back(0.0);
    res.trajectory.push_back(x);
  }
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Vector u = sys.controls.at(t + 0.5 * h);
    const Vector k1 = sys.f(x, theta, u, t);
    const Vector k2 = sys.f(x + 0.5 * h * k1, theta, u, t + 0.5 * h);
    const Vector k3 = sys.f(x + 0.5 * h * k2, theta, u, t + 0.5 * h);
    const Vector k4 = sys.f(x + h * k3, theta, u, t + h);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw IntegrationError(t + h);
    if (record) {
      res.times.push_back((i + 1) * h);
      res.trajectory.push_back(x);
    }
  }
  res.state = std::move(x);
  return res;
}

/// RK4 on the state together with J' = (df/dx) J + [0 | df/dtheta], J(0) = [I | 0].
inline FlowResult integrate_variational(
  const OdeSystem & sys, const Vector & x0, const Vector & theta, double T, int steps)
{
  detail::check_grid(sys, T, steps);
  const double h = T / steps;
  const Eigen::Index n = sys.n;
  const Eigen::Index p = sys.p;
  auto field = [&](const Vector & x, const Matrix & J, const Vector & u, double t, Vector & dx, Matrix & dJ) {
    dx = sys.f(x, theta, u, t);
    const Matrix A = sys.dfdx ? sys.dfdx(x, theta, u, t) : detail::fd_state_jacobian(sys, x, theta, u, t);
    dJ = A * J;
    if (p > 0) {
      dJ.rightCols(p) += sys.dfdtheta ? sys.dfdtheta(x, theta, u, t) : detail::fd_param_jacobian(sys, x, theta, u, t);
    }
  };
  Vector x = x0;
  Matrix J = Matrix::Zero(n, n + p);
  J.leftCols(n).setIdentity();
  Vector k1, k2, k3, k4;
  Matrix K1, K2, K3, K4;
  for (int i = 0; i < steps; ++i) {
    const double t = i * h;
    const Vector u = sys.controls.at(t + 0.5 * h);
    field(x, J, u, t, k1, K1);
    field(x + 0.5 * h * k1, J + 0.5 * h * K1, u, t + 0.5 * h, k2, K2);
    field(x + 0.5 * h * k2, J + 0.5 * h * K2, u, t + 0.5 * h, k3, K3);
    field(x + h * k3, J + h * K3, u, t + h, k4, K4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    J += (h / 6.0) * (K1 + 2.0 * K2 + 2.0 * K3 + K4);
    if (!x.allFinite() || !J.allFinite()) throw IntegrationError(t + h);
  }
  FlowResult res;
  res.state = std::move(x);
  res.jacobian = std::move(J);
  return res;
}

/// z -> projected terminal state, with Jacobian through the variational equation.
inline SmoothMapDescriptor flow_map(const OdeSystem & sys, double t, int steps)
{
  SmoothMapDescriptor f;
  f.name = "flow:" + sys.name;
  f.in_dim = sys.embed.cols();
  f.out_dim = sys.output_dim();
  f.evaluate = [sys, t, steps](const Vector & z) {
    const auto [x0, th] = sys.lift(z);
    return sys.project(integrate_rk4(sys, x0, th, t, steps).state);
  };
  f.jacobian = [sys, t, steps](const Vector & z) {
    const auto [x0, th] = sys.lift(z);
    return Matrix(sys.project_rows(integrate_variational(sys, x0, th, t, steps).jacobian) * sys.embed);
  };
  if (sys.flow_constants) f.constants = sys.flow_constants;
  f.certified = sys.constants_certified;
  return f;
}

struct ReachResult
{
  Polytope hull;
  VertexCloud outputs;  ///< projected terminal states, one per cover point
  BoundReport report;
};

/**
 * @brief Hull of the flowed cover points at time t with the second-order certificate.
 *
 * Constants come from `constants`, then the system's declared flow constants,
 * and otherwise from estimate_lipschitz on the flow map (report flagged
 * non-certified). A non-certified cover also clears the flag.
 */
inline ReachResult reach_hull_estimate(
  const OdeSystem & sys, const BoundaryCover & cover, double t, int steps,
  std::optional<SmoothnessConstants> constants = std::nullopt, bool constants_certified = true)
{
  if (cover.points.dim() != sys.embed.cols()) throw InvalidArgument("reach_hull_estimate: cover dimension mismatch");
  Matrix out(sys.output_dim(), cover.M());
  for (Eigen::Index c = 0; c < cover.M(); ++c) {
    const auto [x0, th] = sys.lift(cover.points.point(c));
    out.col(c) = sys.project(integrate_rk4(sys, x0, th, t, steps).state);
  }
  ReachResult res;
  res.outputs = VertexCloud(std::move(out));
  res.hull = Polytope::from_cloud(res.outputs);

  bool certified = constants_certified;
  if (!constants) {
    if (sys.flow_constants) {
      constants = sys.flow_constants;
      certified = sys.constants_certified;
    } else {
      constants = estimate_lipschitz(flow_map(sys, t, steps), sys.parameters, 1000, 0);
      certified = false;
    }
  }
  constants->r = sys.parameters.radius;
  res.report = make_report(BoundKind::second_order, *constants, cover.delta, certified && cover.certified);
  return res;
}

// ---------------------------------------------------------------------------
// Built-in systems

/// x' = 0 on R^n, uncertain initial state in the unit ball.
inline OdeSystem zero_dynamics(Eigen::Index n, double radius = 1.0)
{
  OdeSystem sys;
  sys.name = "zero";
  sys.n = n;
  sys.p = 0;
  sys.f = [n](const Vector &, const Vector &, const Vector &, double) { return Vector(Vector::Zero(n)); };
  sys.dfdx = [n](const Vector &, const Vector &, const Vector &, double) { return Matrix(Matrix::Zero(n, n)); };
  sys.parameters = SmoothSetDescriptor::ball(Vector::Zero(n), radius);
  sys.base = Vector::Zero(n);
  sys.embed = Matrix::Identity(n, n);
  sys.flow_constants = SmoothnessConstants{1.0, 0.0, 1.0, radius, std::nullopt};
  sys.constants_certified = true;
  return sys;
}

/**
 * @brief Affine system x' = A x + B theta with (x0, theta) in a ball.
 *
 * The flow is the linear map [e^{At} | int_0^t e^{A(t-s)} B ds], so its exact
 * constants are its spectral norm and zero. They are attached for the
 * horizon `t_final`.
 */
inline OdeSystem linear_system(const Matrix & A, const Matrix & B, double radius, double t_final)
{
  const Eigen::Index n = A.rows();
  const Eigen::Index p = B.cols();
  OdeSystem sys;
  sys.name = "linear";
  sys.n = n;
  sys.p = p;
  sys.f = [A, B](const Vector & x, const Vector & th, const Vector &, double) { return Vector(A * x + B * th); };
  sys.dfdx = [A](const Vector &, const Vector &, const Vector &, double) { return A; };
  sys.dfdtheta = [B](const Vector &, const Vector &, const Vector &, double) { return B; };
  sys.parameters = SmoothSetDescriptor::ball(Vector::Zero(n + p), radius);
  sys.base = Vector::Zero(n + p);
  sys.embed = Matrix::Identity(n + p, n + p);

  Matrix aug = Matrix::Zero(n + p, n + p);
  aug.topLeftCorner(n, n) = A * t_final;
  aug.topRightCorner(n, p) = B * t_final;
  const Matrix E = aug.exp();
  const Matrix flow = E.topRows(n);
  sys.flow_constants =
    SmoothnessConstants{Eigen::JacobiSVD<Matrix>(flow).singularValues()(0), 0.0, std::nullopt, radius, std::nullopt};
  sys.constants_certified = true;
  return sys;
}

/// Damped rotation with a scalar forcing parameter, (x0, theta) in the unit ball of R^3.
inline OdeSystem linear_test_system(double t_final = 1.0)
{
  Matrix A(2, 2);
  A << -0.1, 1.0, -1.0, -0.1;
  Matrix B(2, 1);
  B << 0.0, 1.0;
  auto sys = linear_system(A, B, 1.0, t_final);
  sys.name = "linear2d";
  return sys;
}

/**
 * @brief Planar double integrator p' = v, v' = (M_bar + theta_0 / gamma)(u + F)
 * with theta = (gamma dM, F1, F2) on the planning problem's uncertainty ball.
 *
 * Output is the position; the attached constants are the closed-form ones of
 * the position map.
 */
inline OdeSystem double_integrator(const OcpParams & prm, const Matrix & controls)
{
  prm.validate();
  if (controls.rows() != 2 || controls.cols() != prm.T) throw InvalidArgument("double_integrator: controls must be 2 x T");
  OdeSystem sys;
  sys.name = "double_integrator";
  sys.n = 4;
  sys.p = 3;
  const double g = prm.gamma;
  const double Mb = prm.M_bar;
  sys.f = [g, Mb](const Vector & x, const Vector & th, const Vector & u, double) {
    Vector dx(4);
    const double Minv = Mb + th(0) / g;
    dx << x(2), x(3), Minv * (u(0) + th(1)), Minv * (u(1) + th(2));
    return dx;
  };
  sys.dfdx = [](const Vector &, const Vector &, const Vector &, double) {
    Matrix A = Matrix::Zero(4, 4);
    A(0, 2) = A(1, 3) = 1.0;
    return A;
  };
  sys.dfdtheta = [g, Mb](const Vector &, const Vector & th, const Vector & u, double) {
    Matrix Bt = Matrix::Zero(4, 3);
    const double Minv = Mb + th(0) / g;
    Bt(2, 0) = (u(0) + th(1)) / g;
    Bt(3, 0) = (u(1) + th(2)) / g;
    Bt(2, 1) = Bt(3, 2) = Minv;
    return Bt;
  };
  sys.controls.interval = 1.0;
  sys.controls.values = controls;
  const double r = prm.radius() > 0.0 ? prm.radius() : 1.0;
  sys.parameters = SmoothSetDescriptor::ball(Vector::Zero(3), r);
  sys.base = Vector::Zero(7);
  sys.base.head<2>() = prm.p0;
  sys.base.segment<2>(2) = prm.v0;
  sys.embed = Matrix::Zero(7, 3);
  sys.embed.bottomRows(3).setIdentity();
  sys.output = {0, 1};
  sys.flow_constants = prm.constants();
  sys.constants_certified = true;
  return sys;
}

}  // namespace hullcert

#endif  // HULLCERT_REACHABILITY_HPP_
