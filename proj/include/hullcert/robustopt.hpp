#ifndef HULLCERT_ROBUSTOPT_HPP_
#define HULLCERT_ROBUSTOPT_HPP_

/**
 * @file
 * @brief Padded sampled relaxations of robust programs with halfspace
 * constraints, the spacecraft planning instance built on them, and
 * a-posteriori feasibility checks over dense uncertainty draws.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hullcert/bounds.hpp"
#include "hullcert/core.hpp"
#include "hullcert/covers.hpp"
#include "hullcert/ocp_params.hpp"
#include "hullcert/qp.hpp"

namespace hullcert {

/// n'(y - point) <= 0 imposed at the listed grid times; |n| = 1.
struct Halfspace
{
  Vector normal;
  Vector point;
  std::vector<int> times;
};

/// f(x, u, t) = offset + B u for a fixed uncertain input x.
struct AffineInDecision
{
  Vector offset;
  Matrix B;
};

/**
 * @brief min 1/2 u'Pu + q'u  s.t.  f(x, u, t) in every halfspace for all x in X,
 * u_lower <= u <= u_upper, with f affine in u.
 */
struct RobustProgram
{
  Eigen::Index decision_dim = 0;
  Matrix P;
  Vector q;
  std::vector<Halfspace> halfspaces;
  std::function<AffineInDecision(const Vector &, int)> uncertainty_map;
  Vector u_lower;  ///< empty for no box
  Vector u_upper;
  SmoothSetDescriptor uncertainty_set;
  std::optional<SmoothnessConstants> constants;

  void validate() const
  {
    if (P.rows() != decision_dim || P.cols() != decision_dim || q.size() != decision_dim) {
      throw InvalidArgument("RobustProgram: objective has wrong dimensions");
    }
    for (const auto & h : halfspaces) {
      if (std::abs(h.normal.norm() - 1.0) > 1e-12) throw InvalidArgument("RobustProgram: halfspace normal is not unit");
      if (h.point.size() != h.normal.size()) throw InvalidArgument("RobustProgram: halfspace dimension mismatch");
    }
    if (u_lower.size() != u_upper.size() || (u_lower.size() != 0 && u_lower.size() != decision_dim)) {
      throw InvalidArgument("RobustProgram: decision box has wrong dimensions");
    }
    if (!uncertainty_map) throw InvalidArgument("RobustProgram: missing uncertainty map");
  }
};

struct PaddedRelaxation
{
  QuadProg qp;
  double epsilon = 0.0;
  double required_epsilon = 0.0;   ///< second-order bound at the cover's delta (0 when unknown)
  bool padding_sufficient = true;  ///< epsilon >= required_epsilon
  long sample_rows = 0;
};

/**
 * @brief One row n_j' B(x_i, t) u <= -n_j'(offset(x_i, t) - c_j) - epsilon per
 * (sample, halfspace, time), then the decision box.
 *
 * The padding is compared against the second-order bound at the cover's delta
 * and the outcome is reported, not enforced.
 */
inline PaddedRelaxation build_padded_relaxation(
  const RobustProgram & prog, const BoundaryCover & cover, double epsilon)
{
  prog.validate();
  if (!(epsilon >= 0.0)) throw InvalidArgument("build_padded_relaxation: epsilon must be non-negative");
  long rows = 0;
  for (const auto & h : prog.halfspaces) rows += static_cast<long>(h.times.size());
  rows *= cover.M();
  const long box_rows = static_cast<long>(prog.u_lower.size());

  PaddedRelaxation out;
  out.epsilon = epsilon;
  out.sample_rows = rows;
  QuadProg & qp = out.qp;
  qp.P = prog.P;
  qp.q = prog.q;
  qp.A = Matrix::Zero(rows + box_rows, prog.decision_dim);
  qp.l = Vector::Constant(rows + box_rows, -kInf);
  qp.u = Vector::Constant(rows + box_rows, kInf);

  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < cover.M(); ++i) {
    const Vector x = cover.points.point(i);
    for (const auto & h : prog.halfspaces) {
      for (int t : h.times) {
        const auto f = prog.uncertainty_map(x, t);
        if (f.B.cols() != prog.decision_dim || f.offset.size() != h.normal.size()) {
          throw InvalidArgument("build_padded_relaxation: uncertainty map has wrong dimensions");
        }
        qp.A.row(r) = h.normal.transpose() * f.B;
        qp.u(r) = -h.normal.dot(f.offset - h.point) - epsilon;
        ++r;
      }
    }
  }
  for (Eigen::Index k = 0; k < box_rows; ++k, ++r) {
    qp.A(r, k) = 1.0;
    qp.l(r) = prog.u_lower(k);
    qp.u(r) = prog.u_upper(k);
  }

  if (prog.constants && cover.delta > 0.0) {
    SmoothnessConstants c = *prog.constants;
    c.r = prog.uncertainty_set.radius;
    out.required_epsilon = bound_second_order(c, cover.delta);
    out.padding_sufficient = epsilon >= out.required_epsilon * (1.0 - 1e-12);
  }
  return out;
}

/// Obstacle halfspaces on t = 1..switch-1 and switch..T, goal box at T, control box, fuel objective.
inline RobustProgram make_ocp_program(const OcpParams & prm)
{
  prm.validate();
  RobustProgram prog;
  prog.decision_dim = 2 * prm.T;
  prog.P = 2.0 * Matrix::Identity(prog.decision_dim, prog.decision_dim);
  prog.q = Vector::Zero(prog.decision_dim);

  Halfspace h1{prm.n1, prm.c1, {}};
  Halfspace h2{prm.n2, prm.c2, {}};
  for (int t = 1; t <= prm.T; ++t) (t < prm.switch_time ? h1 : h2).times.push_back(t);
  if (!h1.times.empty()) prog.halfspaces.push_back(h1);
  if (!h2.times.empty()) prog.halfspaces.push_back(h2);
  const Eigen::Vector2d hi = prm.p_goal + prm.dp_goal;
  const Eigen::Vector2d lo = prm.p_goal - prm.dp_goal;
  prog.halfspaces.push_back({Eigen::Vector2d(1.0, 0.0), hi, {prm.T}});
  prog.halfspaces.push_back({Eigen::Vector2d(-1.0, 0.0), lo, {prm.T}});
  prog.halfspaces.push_back({Eigen::Vector2d(0.0, 1.0), hi, {prm.T}});
  prog.halfspaces.push_back({Eigen::Vector2d(0.0, -1.0), lo, {prm.T}});

  prog.uncertainty_map = [prm](const Vector & x, int t) {
    const auto a = ocp_position_affine(prm, x, static_cast<double>(t));
    return AffineInDecision{a.offset, a.B};
  };
  prog.u_lower = Vector::Constant(prog.decision_dim, -prm.u_max);
  prog.u_upper = Vector::Constant(prog.decision_dim, prm.u_max);
  prog.uncertainty_set = SmoothSetDescriptor::ball(Vector::Zero(3), prm.radius() > 0.0 ? prm.radius() : 1.0);
  if (prm.F_max > 0.0) prog.constants = prm.constants();
  return prog;
}

inline constexpr double kReferencePadding = 0.025;

struct OcpOptions
{
  std::optional<double> epsilon;   ///< overrides the recomputed padding
  bool use_reference_padding = false;  ///< pad with 0.025 instead of the recomputed value
  long dense_M = 100000;           ///< mesh size of the covering-radius oracle
  QpSettings qp;
};

struct OcpSolution
{
  Matrix controls;  ///< 2 x T
  QpSolution qp;
  BoundReport report;     ///< second-order bound at the lattice's covering radius
  BoundaryCover cover;
  double epsilon = 0.0;   ///< padding actually used
  double recomputed_epsilon = 0.0;
  double reference_epsilon = kReferencePadding;
  bool padding_sufficient = true;
  long rows = 0;
  double solve_seconds = 0.0;
};

/**
 * @brief Padded relaxation of the planning problem on an M-point Fibonacci
 * lattice of the uncertainty sphere, solved with ADMM.
 *
 * The default padding is the second-order bound evaluated at the lattice's
 * measured (inflated) covering radius. With F_max = 0 every sample is the
 * nominal input and the padding defaults to zero.
 */
inline OcpSolution solve_ocp(const OcpParams & prm, long M, const OcpOptions & opt = {})
{
  prm.validate();
  if (M < 4) throw InvalidArgument("solve_ocp: M must be >= 4");
  OcpSolution sol;
  const auto prog = make_ocp_program(prm);
  if (prm.F_max > 0.0) {
    sol.cover = fibonacci_sphere(M, prm.radius(), Vector::Zero(3), opt.dense_M);
    sol.report = make_report(BoundKind::second_order, prm.constants(), sol.cover.delta, false);
    sol.recomputed_epsilon = sol.report.epsilon;
  } else {
    sol.cover.points = VertexCloud(Matrix::Zero(3, M));
    sol.cover.certified = true;
    sol.cover.degenerate = true;
    sol.report.kind = BoundKind::second_order;
    sol.report.constants = prm.constants();
    sol.recomputed_epsilon = 0.0;
  }
  sol.epsilon = opt.epsilon ? *opt.epsilon : (opt.use_reference_padding ? kReferencePadding : sol.recomputed_epsilon);

  const auto relax = build_padded_relaxation(prog, sol.cover, sol.epsilon);
  sol.padding_sufficient = relax.padding_sufficient;
  sol.rows = relax.qp.m();
  const auto t0 = std::chrono::steady_clock::now();
  sol.qp = solve(relax.qp, opt.qp);
  sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sol.controls = Eigen::Map<const Matrix>(sol.qp.x.data(), 2, prm.T);
  return sol;
}

struct ViolationReport
{
  long draws = 0;                      ///< dense interior draws plus boundary cover points
  long violations = 0;                 ///< inputs with an obstacle or goal violation above tolerance
  double max_obstacle_violation = -kInf;  ///< max of n_j'(p(t) - c_j) over inputs and integer times
  double max_goal_excess = -kInf;      ///< max coordinate excess of p(T) outside the goal box
  double fine_grid_max_violation = -kInf;  ///< obstacle value on a 0.1 s grid (outside the certificate)
  double max_control_excess = 0.0;     ///< max(|u|_inf - u_max, 0)
  double tolerance = 1e-9;

  bool feasible() const { return violations == 0; }
};

namespace detail {

inline void check_input(
  const OcpParams & prm, const Matrix & controls, const Vector & x, ViolationReport & rep, bool fine_grid)
{
  double worst_obstacle = -kInf;
  for (int t = 1; t <= prm.T; ++t) {
    const Eigen::Vector2d p = ocp_position(prm, controls, x, t);
    const double v = t < prm.switch_time ? prm.n1.dot(p - prm.c1) : prm.n2.dot(p - prm.c2);
    worst_obstacle = std::max(worst_obstacle, v);
  }
  const Eigen::Vector2d pT = ocp_position(prm, controls, x, prm.T);
  const double goal = ((pT - prm.p_goal).cwiseAbs() - prm.dp_goal).maxCoeff();
  rep.max_obstacle_violation = std::max(rep.max_obstacle_violation, worst_obstacle);
  rep.max_goal_excess = std::max(rep.max_goal_excess, goal);
  if (worst_obstacle > rep.tolerance || goal > rep.tolerance) ++rep.violations;
  if (fine_grid) {
    for (int k = 1; k <= 10 * prm.T; ++k) {
      const double t = 0.1 * k;
      const Eigen::Vector2d p = ocp_position(prm, controls, x, std::min(t, static_cast<double>(prm.T)));
      const double v = t < prm.switch_time ? prm.n1.dot(p - prm.c1) : prm.n2.dot(p - prm.c2);
      rep.fine_grid_max_violation = std::max(rep.fine_grid_max_violation, v);
    }
  }
  ++rep.draws;
}

}  // namespace detail

/**
 * @brief Simulates the closed-form trajectory for dense_M uniform draws from
 * the uncertainty ball plus the given boundary points and reports the worst
 * constraint values on the integer-time grid (and, advisory, on a 0.1 s grid).
 */
inline ViolationReport verify_feasibility(
  const Matrix & controls, const OcpParams & prm, long dense_M, std::uint64_t seed,
  const std::optional<VertexCloud> & boundary = std::nullopt, double tolerance = 1e-9)
{
  prm.validate();
  if (dense_M < 1000) throw InvalidArgument("verify_feasibility: dense_M must be >= 1000");
  if (controls.rows() != 2 || controls.cols() != prm.T) throw InvalidArgument("verify_feasibility: controls must be 2 x T");
  ViolationReport rep;
  rep.tolerance = tolerance;
  rep.max_control_excess = std::max(0.0, controls.cwiseAbs().maxCoeff() - prm.u_max);
  if (prm.radius() > 0.0) {
    const auto ball = SmoothSetDescriptor::ball(Vector::Zero(3), prm.radius());
    const auto draws = sample_ball_uniform(ball, dense_M, seed, 0x56455249ULL);
    for (Eigen::Index i = 0; i < draws.size(); ++i) detail::check_input(prm, controls, draws.point(i), rep, i < 100);
  } else {
    detail::check_input(prm, controls, Vector::Zero(3), rep, true);
  }
  if (boundary) {
    for (Eigen::Index i = 0; i < boundary->size(); ++i) detail::check_input(prm, controls, boundary->point(i), rep, true);
  }
  return rep;
}

struct NaiveCount
{
  long M = 0;
  double delta_required = 0.0;  ///< epsilon / L_bar
  double achieved = 0.0;        ///< covering radius bound of the returned lattice
};

/**
 * @brief Size of a Fibonacci lattice on the uncertainty sphere whose covering
 * radius bound reaches epsilon / L_bar, the radius the first-order bound needs.
 *
 * Searches by bisection on M, assuming the lattice radius decreases with M.
 */
inline NaiveCount naive_sample_count_detail(const OcpParams & prm, double epsilon, long dense_M = 100000)
{
  prm.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("naive_sample_count: epsilon must be positive");
  if (!(prm.radius() > 0.0)) throw InvalidArgument("naive_sample_count: needs F_max > 0");
  NaiveCount out;
  const double r = prm.radius();
  out.delta_required = epsilon / prm.lipschitz_L();
  auto radius_of = [&](long M) { return fibonacci_sphere(M, r, Vector::Zero(3), dense_M).delta; };
  long hi = 2;
  double hi_rad = radius_of(hi);
  if (hi_rad <= out.delta_required) {
    out.M = hi;
    out.achieved = hi_rad;
    return out;
  }
  // Coarse guess from the 1/sqrt(M) law at M = 100, then bracket.
  const double c100 = radius_of(100) * 10.0;
  long guess = std::max(3L, static_cast<long>(std::ceil(std::pow(c100 / out.delta_required, 2))));
  long lo = 2;
  hi = guess;
  while ((hi_rad = radius_of(hi)) > out.delta_required) {
    lo = hi;
    hi = hi * 5 / 4 + 1;
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    const double rad = radius_of(mid);
    if (rad <= out.delta_required) {
      hi = mid;
      hi_rad = rad;
    } else {
      lo = mid;
    }
  }
  out.M = hi;
  out.achieved = hi_rad;
  return out;
}

inline long naive_sample_count(const OcpParams & prm, double epsilon, long dense_M = 100000)
{
  return naive_sample_count_detail(prm, epsilon, dense_M).M;
}

// ---------------------------------------------------------------------------
// Serialization

inline void write_controls_csv(std::ostream & os, const Matrix & controls)
{
  os << std::setprecision(17) << "t,u1,u2\n";
  for (Eigen::Index k = 0; k < controls.cols(); ++k) os << k << ',' << controls(0, k) << ',' << controls(1, k) << '\n';
}

inline Matrix read_controls_csv(std::istream & is)
{
  std::string line;
  std::getline(is, line);
  std::vector<Eigen::Vector2d> cols;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c;
    std::getline(ss, a, ',');
    std::getline(ss, b, ',');
    std::getline(ss, c, ',');
    cols.emplace_back(std::stod(b), std::stod(c));
  }
  Matrix m(2, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = cols[k];
  return m;
}

/// Positions at integer times for every input: columns sample, t, x, y.
inline void write_ensemble_csv(std::ostream & os, const OcpParams & prm, const Matrix & controls, const VertexCloud & inputs)
{
  os << std::setprecision(17) << "sample,t,x,y\n";
  for (Eigen::Index i = 0; i < inputs.size(); ++i) {
    for (int t = 0; t <= prm.T; ++t) {
      const Eigen::Vector2d p = ocp_position(prm, controls, inputs.point(i), t);
      os << i << ',' << t << ',' << p.x() << ',' << p.y() << '\n';
    }
  }
}

inline nlohmann::json to_json(const ViolationReport & rep)
{
  return {
    {"draws", rep.draws},
    {"violations", rep.violations},
    {"feasible", rep.feasible()},
    {"max_obstacle_violation", rep.max_obstacle_violation},
    {"max_goal_excess", rep.max_goal_excess},
    {"fine_grid_max_violation", rep.fine_grid_max_violation},
    {"max_control_excess", rep.max_control_excess},
    {"tolerance", rep.tolerance},
  };
}

}  // namespace hullcert

#endif  // HULLCERT_ROBUSTOPT_HPP_
