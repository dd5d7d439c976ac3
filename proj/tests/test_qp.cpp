#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "hullcert/qp.hpp"
#include "test_util.hpp"

using namespace hullcert;
using hullcert::test::qp_active_set_oracle;
using hullcert::test::qp_dual_oracle;
using hullcert::test::random_qp;

namespace {

// Solution-accuracy checks run with tolerances well below the comparison threshold.
QpSettings tight()
{
  QpSettings st;
  st.eps_abs = st.eps_rel = 1e-10;
  st.max_iter = 200000;
  return st;
}

QuadProg box_problem(const Vector & c, double lo, double hi)
{
  const Eigen::Index n = c.size();
  QuadProg qp;
  qp.P = Matrix::Identity(n, n);
  qp.q = -c;
  qp.A = Matrix::Identity(n, n);
  qp.l = Vector::Constant(n, lo);
  qp.u = Vector::Constant(n, hi);
  return qp;
}

void expect_kkt(const QuadProg & qp, const QpSolution & sol)
{
  const Vector Ax = qp.A * sol.x;
  const Vector clamped = Ax.cwiseMax(qp.l).cwiseMin(qp.u);
  const double ax_inf = Ax.cwiseAbs().maxCoeff();
  EXPECT_LE((Ax - clamped).cwiseAbs().maxCoeff(), 1e-6 * (1 + ax_inf));
  const Vector grad = qp.P * sol.x + qp.q + qp.A.transpose() * sol.y;
  EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-6 * (1 + qp.q.cwiseAbs().maxCoeff()));
}

}  // namespace

TEST(QpSolve, ProjectionExample)
{
  QuadProg qp;
  qp.P = Matrix::Identity(4, 4);
  qp.q = Vector::Zero(4);
  qp.A = Matrix::Zero(1, 4);
  qp.A(0, 0) = 1.0;
  qp.l = Vector::Constant(1, 1.0);
  qp.u = Vector::Constant(1, kInf);
  const auto sol = solve(qp, tight());
  ASSERT_EQ(sol.status, QpStatus::solved);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
  EXPECT_NEAR(sol.x.tail(3).norm(), 0.0, 1e-6);
}

TEST(QpSolve, BoxClamp)
{
  const auto sol = solve(box_problem(Eigen::Vector2d(2, -1), 0.0, 1.0), tight());
  ASSERT_EQ(sol.status, QpStatus::solved);
  EXPECT_NEAR(sol.x(0), 1.0, 1e-6);
  EXPECT_NEAR(sol.x(1), 0.0, 1e-6);
  EXPECT_NEAR(sol.objective, 0.5 - 2.0, 1e-5);
}

TEST(QpSolve, MatchesActiveSetOracleSmall)
{
  CounterRng rng(31, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(rng() % 8);
    const auto qp = random_qp(rng, n, m, trial % 5 == 0);
    const auto sol = solve(qp, tight());
    ASSERT_EQ(sol.status, QpStatus::solved) << "trial " << trial;
    const Vector want = qp_active_set_oracle(qp);
    EXPECT_LE((sol.x - want).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
    expect_kkt(qp, sol);
  }
}

TEST(QpSolve, MatchesDualOracleMedium)
{
  CounterRng rng(32, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto qp = random_qp(rng, 20, 30, trial % 4 == 0);
    const auto sol = solve(qp, tight());
    ASSERT_EQ(sol.status, QpStatus::solved) << "trial " << trial;
    const Vector want = qp_dual_oracle(qp);
    EXPECT_LE((sol.x - want).cwiseAbs().maxCoeff(), 1e-6) << "trial " << trial;
    expect_kkt(qp, sol);
  }
}

TEST(QpSolve, DefaultTerminationResiduals)
{
  CounterRng rng(38, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto qp = random_qp(rng, 20, 30, trial % 4 == 0);
    const auto sol = solve(qp);
    ASSERT_EQ(sol.status, QpStatus::solved);
    const Vector Ax = qp.A * sol.x;
    const Vector Px = qp.P * sol.x;
    const Vector Aty = qp.A.transpose() * sol.y;
    const double inf_ax = Ax.cwiseAbs().maxCoeff();
    EXPECT_LE((Ax - Ax.cwiseMax(qp.l).cwiseMin(qp.u)).cwiseAbs().maxCoeff(), 1e-6 * (1 + inf_ax));
    const double scale = std::max({Px.cwiseAbs().maxCoeff(), Aty.cwiseAbs().maxCoeff(), qp.q.cwiseAbs().maxCoeff()});
    EXPECT_LE(sol.dual_res, 1e-6 * (1 + scale));
    EXPECT_NEAR(sol.dual_res, (Px + qp.q + Aty).cwiseAbs().maxCoeff(), 1e-12 * (1 + scale));
    // Default tolerances still land near the optimum.
    EXPECT_LE((sol.x - qp_dual_oracle(qp)).cwiseAbs().maxCoeff(), 1e-3);
  }
}

TEST(QpSolve, OraclesAgree)
{
  CounterRng rng(33, 1);
  for (int trial = 0; trial < 30; ++trial) {
    const auto qp = random_qp(rng, 4, 6);
    EXPECT_LE((qp_active_set_oracle(qp) - qp_dual_oracle(qp)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(QpSolve, CostScalingInvariance)
{
  CounterRng rng(34, 1);
  for (int trial = 0; trial < 20; ++trial) {
    auto qp = random_qp(rng, 8, 10);
    const Vector x1 = solve(qp, tight()).x;
    for (double c : {0.01, 100.0}) {
      auto scaled = qp;
      scaled.P *= c;
      scaled.q *= c;
      const auto sol = solve(scaled, tight());
      ASSERT_EQ(sol.status, QpStatus::solved);
      EXPECT_LE((sol.x - x1).cwiseAbs().maxCoeff(), 1e-6) << "c = " << c;
    }
  }
}

TEST(QpSolve, Deterministic)
{
  CounterRng rng(35, 1);
  const auto qp = random_qp(rng, 12, 15, true);
  const auto a = solve(qp);
  const auto b = solve(qp);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
}

TEST(QpSolve, PrimalInfeasibleDetected)
{
  QuadProg qp;
  qp.P = Matrix::Identity(2, 2);
  qp.q = Vector::Zero(2);
  qp.A.resize(2, 2);
  qp.A << 1, 0, 1, 0;
  qp.l = Eigen::Vector2d(1.0, -kInf);
  qp.u = Eigen::Vector2d(kInf, 0.0);
  EXPECT_EQ(solve(qp).status, QpStatus::primal_infeasible_suspected);
}

TEST(QpSolve, MaxIterCarriesResiduals)
{
  CounterRng rng(36, 1);
  const auto qp = random_qp(rng, 20, 30);
  QpSettings st;
  st.max_iter = 3;
  const auto sol = solve(qp, st);
  EXPECT_EQ(sol.status, QpStatus::max_iter);
  EXPECT_TRUE(std::isfinite(sol.primal_res));
  EXPECT_TRUE(std::isfinite(sol.dual_res));
}

TEST(QpSolve, RejectsInvalidProblems)
{
  auto qp = box_problem(Eigen::Vector2d(1, 1), 0.0, 1.0);
  qp.l(0) = 2.0;
  EXPECT_THROW(solve(qp), InvalidArgument);
  qp = box_problem(Eigen::Vector2d(1, 1), 0.0, 1.0);
  qp.P(0, 1) = 0.5;
  EXPECT_THROW(solve(qp), InvalidArgument);
  qp = box_problem(Eigen::Vector2d(1, 1), 0.0, 1.0);
  qp.q = Vector::Zero(3);
  EXPECT_THROW(solve(qp), InvalidArgument);
}

TEST(QpTriplets, RoundTrip)
{
  CounterRng rng(37, 1);
  const auto qp = random_qp(rng, 5, 7, true);
  std::stringstream ss;
  write_triplets(ss, qp);
  const auto back = read_triplets(ss);
  EXPECT_EQ(back.P, qp.P);
  EXPECT_EQ(back.q, qp.q);
  EXPECT_EQ(back.A, qp.A);
  EXPECT_EQ(back.l, qp.l);
  EXPECT_EQ(back.u, qp.u);
}
