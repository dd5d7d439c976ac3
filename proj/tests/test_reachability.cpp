#include <cmath>

#include <gtest/gtest.h>

#include "hullcert/covers.hpp"
#include "hullcert/geometry.hpp"
#include "hullcert/maps.hpp"
#include "hullcert/ocp_params.hpp"
#include "hullcert/reachability.hpp"

using namespace hullcert;

namespace {

// Scaling and squaring with a truncated Taylor series.
Matrix expm_oracle(const Matrix & A)
{
  int s = 0;
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm / std::ldexp(1.0, s) > 0.1) ++s;
  const Matrix B = A / std::ldexp(1.0, s);
  Matrix E = Matrix::Identity(A.rows(), A.cols());
  Matrix term = E;
  for (int k = 1; k < 25; ++k) {
    term = term * B / k;
    E += term;
  }
  for (int i = 0; i < s; ++i) E = E * E;
  return E;
}

// Linear flow [e^{AT} | int_0^T e^{A(T-s)} B ds] from the augmented exponential.
Matrix linear_flow_oracle(const Matrix & A, const Matrix & B, double T)
{
  const Eigen::Index n = A.rows();
  const Eigen::Index p = B.cols();
  Matrix aug = Matrix::Zero(n + p, n + p);
  aug.topLeftCorner(n, n) = A * T;
  aug.topRightCorner(n, p) = B * T;
  return expm_oracle(aug).topRows(n);
}

OdeSystem scalar_system(std::function<double(double)> rhs, std::function<double(double)> drhs)
{
  OdeSystem sys;
  sys.name = "scalar";
  sys.n = 1;
  sys.p = 0;
  sys.f = [rhs](const Vector & x, const Vector &, const Vector &, double) { return Vector::Constant(1, rhs(x(0))); };
  sys.dfdx = [drhs](const Vector & x, const Vector &, const Vector &, double) { return Matrix::Constant(1, 1, drhs(x(0))); };
  sys.parameters = SmoothSetDescriptor::ball(Vector::Zero(1), 1.0);
  sys.base = Vector::Zero(1);
  sys.embed = Matrix::Identity(1, 1);
  return sys;
}

// Van der Pol oscillator with the damping as the uncertain parameter; no analytic Jacobians.
OdeSystem van_der_pol()
{
  OdeSystem sys;
  sys.name = "vdp";
  sys.n = 2;
  sys.p = 1;
  sys.f = [](const Vector & x, const Vector & th, const Vector &, double) {
    return Vector(Eigen::Vector2d(x(1), th(0) * (1.0 - x(0) * x(0)) * x(1) - x(0)));
  };
  sys.parameters = SmoothSetDescriptor::ball(Vector::Zero(3), 0.5);
  sys.base = Vector(Eigen::Vector3d(1.0, 0.0, 1.0));
  sys.embed = Matrix::Identity(3, 3);
  return sys;
}

Matrix fd_flow_jacobian(const OdeSystem & sys, const Vector & x0, const Vector & th, double T, int steps, double h)
{
  const Eigen::Index n = sys.n;
  const Eigen::Index p = sys.p;
  Matrix J(n, n + p);
  for (Eigen::Index j = 0; j < n + p; ++j) {
    Vector xp = x0, xm = x0, tp = th, tm = th;
    if (j < n) {
      xp(j) += h;
      xm(j) -= h;
    } else {
      tp(j - n) += h;
      tm(j - n) -= h;
    }
    J.col(j) = (integrate_rk4(sys, xp, tp, T, steps).state - integrate_rk4(sys, xm, tm, T, steps).state) / (2 * h);
  }
  return J;
}

Matrix random_rotation(CounterRng & rng, Eigen::Index d)
{
  Matrix G(d, d);
  for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = rng.normal();
  Eigen::HouseholderQR<Matrix> qr(G);
  return qr.householderQ() * Matrix::Identity(d, d);
}

// Support-gap Hausdorff distance between the ellipse {Phi z : |z| <= 1} and a contained polygon.
double ellipse_gap(const Matrix & Phi, const Polytope & hull, int directions)
{
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    const double a = 2.0 * kPi * k / directions;
    const Vector u = Eigen::Vector2d(std::cos(a), std::sin(a));
    worst = std::max(worst, (Phi.transpose() * u).norm() - support(hull.vertices(), Direction(u)));
  }
  return worst;
}

}  // namespace

TEST(IntegrateRk4, ExponentialGrowth)
{
  const auto sys = scalar_system([](double x) { return x; }, [](double) { return 1.0; });
  const auto res = integrate_rk4(sys, Vector::Ones(1), Vector(), 1.0, 100);
  EXPECT_NEAR(res.state(0), std::exp(1.0), 1e-8);
}

TEST(IntegrateRk4, ConvergenceOrder)
{
  const auto sys = scalar_system([](double x) { return x; }, [](double) { return 1.0; });
  std::vector<double> err;
  for (int steps : {10, 20, 40, 80}) {
    err.push_back(std::abs(integrate_rk4(sys, Vector::Ones(1), Vector(), 1.0, steps).state(0) - std::exp(1.0)));
  }
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double slope = std::log2(err[i - 1] / err[i]);
    EXPECT_GE(slope, 3.7);
    EXPECT_LE(slope, 4.3);
  }
}

TEST(IntegrateRk4, ZeroDynamicsIsExact)
{
  const auto sys = zero_dynamics(3);
  const Vector x0 = Eigen::Vector3d(0.1, -0.7, 1e-3);
  EXPECT_EQ(integrate_rk4(sys, x0, Vector(), 5.0, 17).state, x0);
  const auto var = integrate_variational(sys, x0, Vector(), 5.0, 17);
  EXPECT_EQ(var.jacobian, Matrix(Matrix::Identity(3, 3)));
}

TEST(IntegrateRk4, DoubleIntegratorMatchesClosedForm)
{
  OcpParams prm;
  prm.p0 = Eigen::Vector2d(0.1, 0.2);
  prm.v0 = Eigen::Vector2d(-0.01, 0.03);
  CounterRng rng(21, 1);
  Matrix u(2, prm.T);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = rng.uniform(-prm.u_max, prm.u_max);
  const auto sys = double_integrator(prm, u);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector th = prm.radius() * random_unit_vector(rng, 3);
    const auto [x0, theta] = sys.lift(th);
    for (int t : {1, 7, 30}) {
      const Vector x = integrate_rk4(sys, x0, theta, t, t).state;
      EXPECT_LT((x.head(2) - ocp_position(prm, u, th, t)).norm(), 1e-12) << "t = " << t;
    }
  }
}

TEST(IntegrateRk4, Errors)
{
  const auto sys = scalar_system([](double x) { return x * x; }, [](double x) { return 2 * x; });
  try {
    integrate_rk4(sys, Vector::Ones(1), Vector(), 2.0, 2000);
    FAIL() << "expected blow-up";
  } catch (const IntegrationError & e) {
    EXPECT_GT(e.time(), 0.9);
    EXPECT_LT(e.time(), 1.1);
  }
  EXPECT_THROW(integrate_rk4(sys, Vector::Ones(1), Vector(), 1.0, 0), InvalidArgument);
  EXPECT_THROW(integrate_rk4(sys, Vector::Ones(1), Vector(), 0.0, 5), InvalidArgument);
}

TEST(IntegrateVariational, LinearMatchesMatrixExponential)
{
  CounterRng rng(22, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix A(2, 2);
    Matrix B(2, 1);
    for (Eigen::Index i = 0; i < 4; ++i) A.data()[i] = rng.normal();
    B << rng.normal(), rng.normal();
    const auto sys = linear_system(A, B, 1.0, 1.0);
    const Vector x0 = Eigen::Vector2d(rng.normal(), rng.normal());
    const Vector th = Vector::Constant(1, rng.normal());
    const auto res = integrate_variational(sys, x0, th, 1.0, 400);
    const Matrix Phi = linear_flow_oracle(A, B, 1.0);
    EXPECT_LT((res.jacobian - Phi).norm(), 1e-8 * Phi.norm());
    Vector z(3);
    z << x0, th;
    EXPECT_LT((res.state - Phi * z).norm(), 1e-8 * (1 + (Phi * z).norm()));
  }
}

TEST(IntegrateVariational, InitialJacobianIsIdentity)
{
  const auto sys = van_der_pol();
  const auto [x0, th] = sys.lift(Vector::Zero(3));
  const auto res = integrate_variational(sys, x0, th, 1e-12, 1);
  EXPECT_LT((res.jacobian - (Matrix(2, 3) << 1, 0, 0, 0, 1, 0).finished()).norm(), 1e-9);
}

TEST(IntegrateVariational, AgreesWithFiniteDifferences)
{
  CounterRng rng(23, 1);
  auto check = [&](const OdeSystem & sys, double T, int steps) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto [x0, th] = sys.lift(sys.parameters.radius * random_unit_vector(rng, sys.embed.cols()));
      const Matrix J = integrate_variational(sys, x0, th, T, steps).jacobian;
      const Matrix Jfd = fd_flow_jacobian(sys, x0, th, T, steps, 1e-5);
      EXPECT_LE((J - Jfd).norm(), 1e-4 * J.norm()) << sys.name;
    }
  };
  check(linear_test_system(2.0), 2.0, 200);
  check(van_der_pol(), 3.0, 300);
  check(zero_dynamics(2), 1.0, 10);
  const OcpParams prm;
  Matrix u(2, prm.T);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = rng.uniform(-prm.u_max, prm.u_max);
  check(double_integrator(prm, u), 30.0, 30);
}

TEST(FlowMap, JacobianConsistent)
{
  const auto sys = van_der_pol();
  const auto f = flow_map(sys, 2.0, 200);
  EXPECT_EQ(f.in_dim, 3);
  EXPECT_EQ(f.out_dim, 2);
  EXPECT_FALSE(f.certified);
  CounterRng rng(24, 1);
  std::vector<Vector> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(0.5 * random_unit_vector(rng, 3));
  EXPECT_LE(jacobian_check(f, VertexCloud(pts), 1e-5), 1e-6);
}

TEST(ReachHullEstimate, ZeroDynamicsReturnsCoverHull)
{
  const auto cover = circle_cover_n(1.0, 16);
  const auto res = reach_hull_estimate(zero_dynamics(2), cover, 1.0, 4);
  EXPECT_EQ(res.hull.size(), 16);
  EXPECT_LT((res.outputs.matrix() - cover.points.matrix()).norm(), 1e-15);
  EXPECT_DOUBLE_EQ(res.report.epsilon, 0.5 * cover.delta * cover.delta);
  EXPECT_TRUE(res.report.certified);
}

TEST(ReachHullEstimate, DoubleIntegratorMatchesPositionMap)
{
  const OcpParams prm;
  CounterRng rng(25, 1);
  Matrix u(2, prm.T);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = rng.uniform(-prm.u_max, prm.u_max);
  const auto sys = double_integrator(prm, u);
  const auto cover = fibonacci_sphere(100, prm.radius(), Vector::Zero(3), 10000);
  for (int t : {10, 30}) {
    const auto res = reach_hull_estimate(sys, cover, t, 10 * t);
    const VertexCloud direct = map_ocp_position(u, t, prm).apply(cover.points);
    EXPECT_LT((res.outputs.matrix() - direct.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_NEAR(res.report.epsilon, bound_second_order(prm.constants(), cover.delta), 1e-15);
    EXPECT_FALSE(res.report.certified);  // Fibonacci covers are not certified
  }
}

TEST(ReachHullEstimate, LinearBoundDominatesDenseReference)
{
  const auto sys = linear_test_system(1.0);
  const auto cover = fibonacci_sphere(100, 1.0, Vector::Zero(3), 100000);
  const auto res = reach_hull_estimate(sys, cover, 1.0, 100);
  EXPECT_TRUE(sys.constants_certified);

  const VertexCloud dense = flow_map(sys, 1.0, 100).apply(VertexCloud(Matrix(fibonacci_unit_points(10000))));
  Matrix outer(2, dense.size() + res.outputs.size());
  outer << dense.matrix(), res.outputs.matrix();
  const double dh = hausdorff_nested(VertexCloud(outer), res.hull);
  EXPECT_LE(dh, res.report.epsilon);
  // Analytic ellipse reference.
  Matrix A(2, 2);
  A << -0.1, 1.0, -1.0, -0.1;
  Matrix B(2, 1);
  B << 0.0, 1.0;
  const Matrix Phi = linear_flow_oracle(A, B, 1.0);
  EXPECT_LE(ellipse_gap(Phi, res.hull, 20000), res.report.epsilon);
  EXPECT_NEAR(sys.flow_constants->L_bar, Eigen::JacobiSVD<Matrix>(Phi).singularValues()(0), 1e-10);
}

TEST(ReachHullEstimate, CertificateSoundOnRandomCovers)
{
  const auto sys = linear_test_system(1.0);
  Matrix A(2, 2);
  A << -0.1, 1.0, -1.0, -0.1;
  Matrix B(2, 1);
  B << 0.0, 1.0;
  const Matrix Phi = linear_flow_oracle(A, B, 1.0);
  const auto sphere = SmoothSetDescriptor::sphere(Vector::Zero(3), 1.0);
  CounterRng rng(26, 1);
  int sound = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const long M = 30 + static_cast<long>(rng() % 170);
    BoundaryCover cover;
    cover.points = VertexCloud(Matrix(random_rotation(rng, 3) * fibonacci_unit_points(M)));
    cover.delta = certified_covering_radius(cover, sphere, 10000);
    const auto res = reach_hull_estimate(sys, cover, 1.0, 50);
    sound += ellipse_gap(Phi, res.hull, 4000) <= res.report.epsilon;
  }
  EXPECT_EQ(sound, 100);
}

TEST(ReachHullEstimate, EstimatedConstantsAreFlagged)
{
  auto sys = van_der_pol();
  const auto cover = fibonacci_sphere(50, 0.5, Vector::Zero(3), 10000);
  const auto res = reach_hull_estimate(sys, cover, 1.0, 50);
  EXPECT_FALSE(res.report.certified);
  EXPECT_GT(res.report.constants.L_bar, 0.0);
  EXPECT_DOUBLE_EQ(res.report.constants.r, 0.5);
  EXPECT_THROW(reach_hull_estimate(sys, circle_cover_n(1.0, 8), 1.0, 10), InvalidArgument);
}
