#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hullcert/hullcert.hpp"
#include "test_util.hpp"

using namespace hullcert;

namespace {

struct Outcome
{
  bool pass = true;
  std::string detail;
};

class Clock
{
public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void note(Outcome & out, bool ok, const std::string & what)
{
  if (!ok) out.pass = false;
  if (!out.detail.empty()) out.detail += "; ";
  out.detail += (ok ? "" : "FAILED ") + what;
}

Outcome identity_tightness()
{
  Clock clk;
  Outcome out;
  const SmoothnessConstants id;
  const auto proxy = circle_cover_n(1.0, 100000);
  double lo = kInf;
  double hi = -kInf;
  bool bounded = true;
  double worst_gap = 0.0;
  for (long N : {8, 16, 32, 64}) {
    const auto cover = circle_cover_n(1.0, N);
    Matrix outer(2, proxy.points.size() + N);
    outer << proxy.points.matrix(), cover.points.matrix();
    const double dh = hausdorff_nested(VertexCloud(outer), Polytope::from_cloud(cover.points));
    const double analytic = 1.0 - std::cos(kPi / N);
    worst_gap = std::max(worst_gap, std::abs(dh - analytic));
    const double bound = bound_second_order(id, 2.0 * std::sin(kPi / N));
    bounded = bounded && dh <= bound;
    lo = std::min(lo, bound / dh);
    hi = std::max(hi, bound / dh);
  }
  note(out, worst_gap <= 1e-9, "d_H vs 1-cos(pi/N) gap " + fmt("%.2e", worst_gap));
  note(out, bounded, "d_H <= delta^2/2 at every N");
  note(out, lo >= 3.5 && hi <= 4.5, "ratio in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");
  note(out, clk.seconds() < 5.0, "runtime " + fmt("%.2f", clk.seconds()) + " s < 5 s");
  return out;
}

Outcome dumbgen_ratio()
{
  Clock clk;
  Outcome out;
  CounterRng rng(2, 0);
  int exact = 0;
  for (int i = 0; i < 100; ++i) {
    SmoothnessConstants c;
    c.r = std::exp(rng.uniform(std::log(1e-3), std::log(1e3)));
    const double delta = c.r * rng.uniform(1e-4, 1.0);
    if (bound_second_order(c, delta) / bound_dumbgen(c.r, delta) == 0.5) ++exact;
  }
  note(out, exact == 100, std::to_string(exact) + "/100 ratios exactly 0.5");
  note(out, clk.seconds() < 5.0, "runtime " + fmt("%.2f", clk.seconds()) + " s");
  return out;
}

Outcome sensitivity_reproduction()
{
  Clock clk;
  Outcome out;
  for (double L : {1.0, 3.0}) {
    SensitivitySettings s;
    s.L = L;
    s.epsilon = 1e-2;
    s.trials = 100;
    s.seed = 8;
    const auto res = run_sensitivity(s);
    bool valid = true;
    double worst_proxy = 0.0;
    std::string below;
    for (const auto & row : res.rows) {
      worst_proxy = std::max(worst_proxy, row.proxy_err);
      if (row.empirical < row.bound2) {
        valid = false;
        below += " M=" + std::to_string(row.M);
      }
    }
    const std::string tag = "L=" + fmt("%g", L) + ": ";
    note(out, res.rows.size() >= 8, tag + std::to_string(res.rows.size()) + " M values");
    note(out, valid, tag + "empirical >= second-order curve" + below);
    const double ratio = static_cast<double>(res.M90_first) / static_cast<double>(res.M90_second);
    note(out, ratio >= 5.0,
         tag + "M90 first/second = " + std::to_string(res.M90_first) + "/" + std::to_string(res.M90_second) + " = " +
           fmt("%.1f", ratio));
    note(out, worst_proxy <= 1e-4, tag + "proxy error " + fmt("%.1e", worst_proxy));
  }
  note(out, clk.seconds() < 600.0, "runtime " + fmt("%.1f", clk.seconds()) + " s < 600 s");
  return out;
}

// Largest distance from a circle point to the nearest sample: half the widest angular gap as a chord.
double circle_covering_radius(const VertexCloud & pts)
{
  std::vector<double> ang;
  for (Eigen::Index i = 0; i < pts.size(); ++i) ang.push_back(std::atan2(pts.point(i)(1), pts.point(i)(0)));
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + 2.0 * kPi - ang.back();
  for (std::size_t i = 1; i < ang.size(); ++i) gap = std::max(gap, ang[i] - ang[i - 1]);
  return 2.0 * std::sin(gap / 4.0);
}

Outcome covering_soundness()
{
  Clock clk;
  Outcome out;
  const auto circle = SmoothSetDescriptor::ball(Vector::Zero(2), 1.0);
  const long trials = 500;
  int cells = 0;
  std::string worst;
  for (double delta : {0.1, 0.3}) {
    const long N = covering_number(circle, delta / 2.0);
    const double Lambda = lambda_uniform(circle, delta);
    for (long M : {50, 200, 800}) {
      long failures = 0;
      for (long k = 0; k < trials; ++k) {
        if (circle_covering_radius(sample_boundary_uniform(circle, M, 4, static_cast<std::uint64_t>(k))) > delta) ++failures;
      }
      const double beta = std::min(1.0, covering_failure_prob(N, Lambda, M).beta);
      const double freq = static_cast<double>(failures) / trials;
      const double limit = beta + 3.0 * std::sqrt(beta * (1.0 - beta) / trials);
      if (freq <= limit) ++cells;
      else worst += " (delta=" + fmt("%g", delta) + ", M=" + std::to_string(M) + ")";
    }
  }
  note(out, cells == 6, std::to_string(cells) + "/6 cells within beta + 3 SE" + worst);
  note(out, clk.seconds() < 120.0, "runtime " + fmt("%.1f", clk.seconds()) + " s < 120 s");
  return out;
}

Outcome ocp_end_to_end()
{
  Clock clk;
  Outcome out;
  OcpExperimentSettings s;
  s.M = 100;
  s.dense_draws = 1000;
  const auto res = run_ocp_experiment(s);
  const auto & v = res.verification;
  note(out, res.solution.qp.status == QpStatus::solved, std::string("QP ") + to_string(res.solution.qp.status));
  note(out, v.violations == 0 && v.tolerance == 1e-9,
       std::to_string(v.violations) + " violations over " + std::to_string(v.draws) + " inputs");
  const long naive = res.naive ? res.naive->M : -1;
  note(out, naive >= 2500 && naive <= 4500, "naive count " + std::to_string(naive) + " in [2500, 4500]");
  note(out, std::isfinite(res.epsilon_discrepancy),
       "recomputed eps " + fmt("%.6f", res.solution.recomputed_epsilon) + " vs 0.025, discrepancy " +
         fmt("%+.6f", res.epsilon_discrepancy));
  note(out, clk.seconds() < 30.0, "runtime " + fmt("%.1f", clk.seconds()) + " s < 30 s");
  return out;
}

OdeSystem exponential_growth()
{
  OdeSystem sys;
  sys.name = "exp";
  sys.n = 1;
  sys.p = 0;
  sys.f = [](const Vector & x, const Vector &, const Vector &, double) { return x; };
  sys.dfdx = [](const Vector &, const Vector &, const Vector &, double) { return Matrix::Identity(1, 1); };
  sys.parameters = SmoothSetDescriptor::ball(Vector::Zero(1), 1.0);
  sys.base = Vector::Zero(1);
  sys.embed = Matrix::Identity(1, 1);
  return sys;
}

Matrix fd_flow_jacobian(const OdeSystem & sys, const Vector & x0, const Vector & th, double T, int steps, double h)
{
  Matrix J(sys.n, sys.n + sys.p);
  for (Eigen::Index j = 0; j < J.cols(); ++j) {
    Vector xp = x0, xm = x0, tp = th, tm = th;
    if (j < sys.n) {
      xp(j) += h;
      xm(j) -= h;
    } else {
      tp(j - sys.n) += h;
      tm(j - sys.n) -= h;
    }
    J.col(j) = (integrate_rk4(sys, xp, tp, T, steps).state - integrate_rk4(sys, xm, tm, T, steps).state) / (2 * h);
  }
  return J;
}

Outcome numerical_kernels()
{
  Clock clk;
  Outcome out;

  double mn_err = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng rng(seed, 6);
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng() % 3);
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 6);
    Matrix m(d, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0) + 0.5;
    const VertexCloud c(m);
    mn_err = std::max(mn_err, std::abs(min_norm_point(c).norm - test::brute_min_norm(c)));
  }
  note(out, mn_err <= 1e-8, "min-norm max error " + fmt("%.1e", mn_err));

  QpSettings tight;
  tight.eps_abs = tight.eps_rel = 1e-10;
  tight.max_iter = 200000;
  CounterRng qrng(66, 1);
  double qp_err = 0.0;
  int solved = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(qrng() % 19);
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(qrng() % 30);
    const auto qp = test::random_qp(qrng, n, m, trial % 5 == 0);
    const auto sol = solve(qp, tight);
    if (sol.status == QpStatus::solved) ++solved;
    const Vector want = n <= 6 && m <= 8 ? test::qp_active_set_oracle(qp) : test::qp_dual_oracle(qp);
    qp_err = std::max(qp_err, (sol.x - want).cwiseAbs().maxCoeff());
  }
  note(out, solved == 50 && qp_err <= 1e-6, std::to_string(solved) + "/50 QPs solved, max error " + fmt("%.1e", qp_err));

  const auto growth = exponential_growth();
  double slope_lo = kInf;
  double slope_hi = -kInf;
  double prev = 0.0;
  for (int steps : {10, 20, 40, 80}) {
    const double err = std::abs(integrate_rk4(growth, Vector::Ones(1), Vector(), 1.0, steps).state(0) - std::exp(1.0));
    if (prev > 0.0) {
      slope_lo = std::min(slope_lo, std::log2(prev / err));
      slope_hi = std::max(slope_hi, std::log2(prev / err));
    }
    prev = err;
  }
  note(out, slope_lo >= 3.7 && slope_hi <= 4.3, "RK4 order in [" + fmt("%.3f", slope_lo) + ", " + fmt("%.3f", slope_hi) + "]");

  CounterRng vrng(67, 1);
  double var_err = 0.0;
  const OcpParams prm;
  Matrix u(2, prm.T);
  for (Eigen::Index i = 0; i < u.size(); ++i) u.data()[i] = vrng.uniform(-prm.u_max, prm.u_max);
  const std::vector<std::pair<OdeSystem, std::pair<double, int>>> systems = {
    {linear_test_system(2.0), {2.0, 200}}, {double_integrator(prm, u), {30.0, 30}}};
  for (const auto & [sys, grid] : systems) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto [x0, th] = sys.lift(sys.parameters.radius * random_unit_vector(vrng, sys.embed.cols()));
      const Matrix J = integrate_variational(sys, x0, th, grid.first, grid.second).jacobian;
      const Matrix Jfd = fd_flow_jacobian(sys, x0, th, grid.first, grid.second, 1e-5);
      var_err = std::max(var_err, (J - Jfd).norm() / J.norm());
    }
  }
  note(out, var_err <= 1e-4, "variational relative error " + fmt("%.1e", var_err));
  note(out, clk.seconds() < 120.0, "runtime " + fmt("%.1f", clk.seconds()) + " s < 120 s");
  return out;
}

Outcome property_suite()
{
  Clock clk;
  Outcome out;
  const std::vector<std::string> suites = {"test_geometry", "test_covers",  "test_bounds",     "test_maps",
                                           "test_reachability", "test_qp", "test_robustopt", "test_cli"};
  int passed = 0;
  std::string failed;
  for (const auto & s : suites) {
    const std::string cmd = std::string(HULLCERT_TEST_DIR) + "/" + s + " --gtest_brief=1 > /dev/null 2>&1";
    if (std::system(cmd.c_str()) == 0) ++passed;
    else failed += " " + s;
  }
  note(out, passed == static_cast<int>(suites.size()),
       std::to_string(passed) + "/" + std::to_string(suites.size()) + " suites green" + failed);
  note(out, true, "runtime " + fmt("%.1f", clk.seconds()) + " s");
  return out;
}

}  // namespace

int main(int argc, char ** argv)
{
  const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria = {
    {"identity-map tightness", identity_tightness},
    {"second-order vs reach-based bound ratio", dumbgen_ratio},
    {"sample-size sensitivity", sensitivity_reproduction},
    {"covering-failure soundness", covering_soundness},
    {"robust planning end-to-end", ocp_end_to_end},
    {"numerical kernels", numerical_kernels},
    {"property suite", property_suite},
  };
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception & e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("CRITERION %d %s: %s | %s\n", id, o.pass ? "PASS" : "FAIL", criteria[k].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
