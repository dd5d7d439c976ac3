#ifndef HULLCERT_CLI_HPP_
#define HULLCERT_CLI_HPP_

/**
 * @file
 * @brief Command-line front end.
 *
 *     hullcert <command> [--config FILE] [--seed N] [--out DIR] [--format csv|json|svg]...
 *
 * Commands: estimate-hull, sample-cover, bound, reach, solve-ocp,
 * experiment sensitivity, experiment ocp. Results go to files in --out;
 * diagnostics go to stderr. Exit codes: 0 success, 2 configuration error,
 * 3 numerical failure.
 */

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hullcert/bounds.hpp"
#include "hullcert/config.hpp"
#include "hullcert/covers.hpp"
#include "hullcert/experiments.hpp"
#include "hullcert/geometry.hpp"
#include "hullcert/maps.hpp"
#include "hullcert/ocp_params.hpp"
#include "hullcert/qp.hpp"
#include "hullcert/reachability.hpp"
#include "hullcert/robustopt.hpp"
#include "hullcert/svg.hpp"

namespace hullcert::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Raised when a command finishes but its numerical result is unusable.
class CommandFailure : public NumericalError
{
public:
  using NumericalError::NumericalError;
};

struct Context
{
  Config config;
  std::uint64_t seed = 0;
  std::filesystem::path out = ".";
  std::set<std::string> formats = {"csv", "json", "svg"};

  bool wants(const std::string & f) const { return formats.count(f) != 0; }

  std::filesystem::path path(const std::string & name) const { return out / name; }

  void write(const std::string & name, const std::function<void(std::ostream &)> & body) const
  {
    std::ofstream f(path(name), std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + path(name).string() + "'");
    body(f);
    if (!f) throw ConfigError("write failed for '" + path(name).string() + "'");
  }

  void write_json(const std::string & name, const nlohmann::json & j) const
  {
    write(name, [&](std::ostream & os) { os << j.dump(2) << '\n'; });
  }

  void write_svg(const std::string & name, const svg::Plot & p) const
  {
    write(name, [&](std::ostream & os) { p.render(os); });
  }
};

namespace detail {

inline const std::set<std::string> kCommonKeys = {"seed"};

inline std::set<std::string> keys(std::initializer_list<const char *> list)
{
  std::set<std::string> s = kCommonKeys;
  for (const char * k : list) s.insert(k);
  return s;
}

inline Vector vector_key(const Config & c, const std::string & key, const Vector & fallback)
{
  if (!c.has(key)) return fallback;
  const auto v = c.get_double_list(key, {});
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  if (fallback.size() && out.size() != fallback.size()) {
    throw ConfigError("key '" + key + "': expected " + std::to_string(fallback.size()) + " components");
  }
  return out;
}

inline Eigen::Vector2d vec2_key(const Config & c, const std::string & key, const Eigen::Vector2d & fallback)
{
  return vector_key(c, key, Vector(fallback));
}

inline const std::set<std::string> kOcpKeys = {
  "T", "u_max", "F_max", "mass_min", "mass_max", "gamma", "M_bar", "switch_time",
  "n1", "c1", "n2", "c2", "p_goal", "dp_goal", "p0", "v0"};

inline OcpParams ocp_params(const Config & c)
{
  OcpParams p;
  p.T = static_cast<int>(c.get_long("T", p.T));
  p.u_max = c.get_double("u_max", p.u_max);
  p.F_max = c.get_double("F_max", p.F_max);
  p.mass_min = c.get_double("mass_min", p.mass_min);
  p.mass_max = c.get_double("mass_max", p.mass_max);
  p.gamma = c.get_double("gamma", p.gamma);
  p.M_bar = c.get_double("M_bar", p.M_bar);
  p.switch_time = static_cast<int>(c.get_long("switch_time", std::min(p.switch_time, p.T)));
  auto unit = [&](const std::string & key, const Eigen::Vector2d & fb) {
    const Eigen::Vector2d v = vec2_key(c, key, fb);
    if (!(v.norm() > 0.0)) throw ConfigError("key '" + key + "': zero normal");
    return Eigen::Vector2d(v.normalized());
  };
  p.n1 = unit("n1", p.n1);
  p.n2 = unit("n2", p.n2);
  p.c1 = vec2_key(c, "c1", p.c1);
  p.c2 = vec2_key(c, "c2", p.c2);
  p.p_goal = vec2_key(c, "p_goal", p.p_goal);
  p.dp_goal = vec2_key(c, "dp_goal", p.dp_goal);
  p.p0 = vec2_key(c, "p0", p.p0);
  p.v0 = vec2_key(c, "v0", p.v0);
  p.validate();
  return p;
}

inline QpSettings qp_settings(const Config & c)
{
  QpSettings s;
  s.max_iter = static_cast<int>(c.get_long("qp_max_iter", s.max_iter));
  s.eps_abs = c.get_double("qp_eps_abs", s.eps_abs);
  s.eps_rel = c.get_double("qp_eps_rel", s.eps_rel);
  return s;
}

inline const std::set<std::string> kQpKeys = {"qp_max_iter", "qp_eps_abs", "qp_eps_rel"};

inline std::set<std::string> merge(std::set<std::string> a, const std::set<std::string> & b)
{
  a.insert(b.begin(), b.end());
  return a;
}

inline SmoothSetDescriptor set_from(const Config & c)
{
  const auto kind = c.get_string("set", "circle");
  const double r = c.get_double("radius", 1.0);
  if (kind == "circle") return SmoothSetDescriptor::ball(vector_key(c, "center", Vector::Zero(2)), r);
  if (kind == "sphere") return SmoothSetDescriptor::ball(vector_key(c, "center", Vector::Zero(3)), r);
  throw ConfigError("unknown set '" + kind + "' (expected circle or sphere)");
}

inline SmoothMapDescriptor map_from(const Config & c, Eigen::Index dim)
{
  const auto name = c.get_string("map", "identity");
  if (name == "identity") return map_identity(dim);
  if (dim != 2) throw ConfigError("map '" + name + "' needs a 2-dimensional set");
  if (name == "scaling") return map_scaling(c.get_double("L", 1.0));
  if (name == "polar") return map_polar();
  throw ConfigError("unknown map '" + name + "' (expected identity, scaling or polar)");
}

/// Circle: equally spaced points (by M or by delta). Sphere: Fibonacci lattice. Or uniform random draws.
inline BoundaryCover cover_from(const Config & c, const SmoothSetDescriptor & set, std::uint64_t seed)
{
  const auto method = c.get_string("method", "grid");
  const bool by_delta = c.has("delta");
  if (by_delta == c.has("M")) throw ConfigError("exactly one of 'M' and 'delta' is required");
  const long dense_M = c.get_long("dense_M", set.ball_dim() == 2 ? 1000000 : 100000);
  if (method == "grid") {
    if (set.ball_dim() == 2) {
      auto cov = by_delta ? circle_cover(set.radius, c.get_double("delta", 0.0), set.center)
                          : circle_cover_n(set.radius, c.get_long("M", 0), set.center);
      return cov;
    }
    if (by_delta) throw ConfigError("sphere grid covers are sized by 'M'");
    return fibonacci_sphere(c.get_long("M", 0), set.radius, set.center, dense_M);
  }
  if (method == "uniform") {
    if (by_delta) throw ConfigError("uniform covers are sized by 'M'");
    BoundaryCover cov;
    cov.points = sample_boundary_uniform(set, c.get_long("M", 0), seed);
    cov.seed = seed;
    cov.measured = covering_radius(cov, set, dense_M);
    cov.delta = cov.measured + boundary_mesh(set, dense_M).resolution;
    return cov;
  }
  throw ConfigError("unknown cover method '" + method + "' (expected grid or uniform)");
}

inline BoundKind bound_kind(const std::string & s)
{
  if (s == "first_order") return BoundKind::first_order;
  if (s == "second_order") return BoundKind::second_order;
  if (s == "diffeo") return BoundKind::diffeo;
  if (s == "dumbgen") return BoundKind::dumbgen;
  throw ConfigError("unknown bound kind '" + s + "'");
}

inline svg::Series polygon_series(const VertexCloud & pts, const std::string & label, const std::string & color)
{
  svg::Series s;
  s.label = label;
  s.color = color;
  s.closed = true;
  for (Eigen::Index i = 0; i < pts.size(); ++i) {
    s.x.push_back(pts.matrix()(0, i));
    s.y.push_back(pts.matrix()(1, i));
  }
  return s;
}

inline svg::Series point_series(const VertexCloud & pts, const std::string & label, const std::string & color)
{
  auto s = polygon_series(pts, label, color);
  s.closed = false;
  s.markers = true;
  return s;
}

inline nlohmann::json cover_json(const BoundaryCover & c)
{
  return {{"M", c.M()}, {"delta", c.delta}, {"certified", c.certified}, {"degenerate", c.degenerate},
          {"measured", c.measured >= 0.0 ? nlohmann::json(c.measured) : nlohmann::json(nullptr)},
          {"seed", c.seed}};
}

inline std::vector<Eigen::Vector2d> trajectory(const OcpParams & prm, const Matrix & u, const Vector & x)
{
  std::vector<Eigen::Vector2d> out;
  for (int k = 0; k <= 10 * prm.T; ++k) out.push_back(ocp_position(prm, u, x, std::min(0.1 * k, double(prm.T))));
  return out;
}

inline svg::Plot ocp_plot(const OcpParams & prm, const OcpSolution & sol)
{
  svg::Plot p;
  p.title = "Robust trajectory";
  p.x_label = "p1";
  p.y_label = "p2";
  p.equal_aspect = true;
  svg::Series nominal{"nominal trajectory", "#1f77b4", {}, {}, false, false, false};
  for (const auto & q : trajectory(prm, sol.controls, Vector::Zero(3))) {
    nominal.x.push_back(q.x());
    nominal.y.push_back(q.y());
  }
  // Obstacle boundaries n'(p - c) = 0 drawn over the plotted x range.
  auto obstacle = [&](const Eigen::Vector2d & n, const Eigen::Vector2d & c, const std::string & label, const char * col) {
    svg::Series s{label, col, {}, {}, false, false, true};
    for (double x : {-0.2, 2.4}) {
      s.x.push_back(x);
      s.y.push_back(c.y() - n.x() / n.y() * (x - c.x()));
    }
    return s;
  };
  p.add(obstacle(prm.n1, prm.c1, "obstacle 1", "#d62728"));
  p.add(obstacle(prm.n2, prm.c2, "obstacle 2", "#ff7f0e"));
  const Eigen::Vector2d lo = prm.p_goal - prm.dp_goal;
  const Eigen::Vector2d hi = prm.p_goal + prm.dp_goal;
  p.add({"goal box", "#2ca02c", {lo.x(), hi.x(), hi.x(), lo.x()}, {lo.y(), lo.y(), hi.y(), hi.y()}, false, true, false});
  p.add(nominal);
  Matrix terminal(2, sol.cover.M());
  for (Eigen::Index i = 0; i < sol.cover.M(); ++i) {
    terminal.col(i) = ocp_position(prm, sol.controls, sol.cover.points.point(i), prm.T);
  }
  const auto hull = Polytope::from_cloud(VertexCloud(terminal));
  p.add(polygon_series(hull.vertices(), "terminal hull", "#9467bd"));
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands

inline void cmd_estimate_hull(const Context & ctx)
{
  const auto & c = ctx.config;
  c.require_known(detail::keys({"set", "radius", "center", "map", "L", "M", "delta", "method", "dense_M", "bound"}));
  const auto set = detail::set_from(c);
  const auto f = detail::map_from(c, set.ball_dim());
  const auto kind = detail::bound_kind(c.get_string("bound", "second_order"));
  const auto cover = detail::cover_from(c, set, ctx.seed);
  const VertexCloud image = f.apply(cover.points);
  const auto hull = Polytope::from_cloud(image);
  SmoothnessConstants k = constants_on(f, set);
  const auto report = make_report(kind, k, cover.delta, f.certified && cover.certified);

  if (ctx.wants("csv")) ctx.write("hull.csv", [&](std::ostream & os) { write_csv(os, hull); });
  if (ctx.wants("json")) {
    ctx.write_json("report.json", {{"command", "estimate-hull"}, {"map", f.name}, {"cover", detail::cover_json(cover)},
                                   {"bound", to_json(report)}, {"hull", to_json(hull)}});
  }
  if (ctx.wants("svg") && hull.dim() == 2) {
    svg::Plot p;
    p.title = "Hull of mapped samples";
    p.x_label = "y1";
    p.y_label = "y2";
    p.equal_aspect = true;
    const auto dense = circle_cover_n(set.radius, 720, set.center);
    p.add(detail::polygon_series(f.apply(dense.points), "image of boundary", "#7f7f7f"));
    p.add(detail::polygon_series(hull.vertices(), "sample hull", "#1f77b4"));
    p.add(detail::point_series(image, "samples", "#d62728"));
    ctx.write_svg("hull.svg", p);
  }
}

inline void cmd_sample_cover(const Context & ctx)
{
  const auto & c = ctx.config;
  c.require_known(detail::keys({"set", "radius", "center", "M", "delta", "method", "dense_M"}));
  const auto set = detail::set_from(c);
  auto cover = detail::cover_from(c, set, ctx.seed);
  const long dense_M = c.get_long("dense_M", set.ball_dim() == 2 ? 1000000 : 100000);
  const double oracle = covering_radius(cover, set, dense_M);
  if (ctx.wants("csv")) ctx.write("cover.csv", [&](std::ostream & os) { write_csv(os, cover); });
  if (ctx.wants("json")) {
    auto j = detail::cover_json(cover);
    j["command"] = "sample-cover";
    j["oracle_radius"] = oracle;
    j["dense_M"] = dense_M;
    ctx.write_json("cover.json", j);
  }
  if (ctx.wants("svg") && set.ball_dim() == 2) {
    svg::Plot p;
    p.title = "Boundary cover";
    p.x_label = "x1";
    p.y_label = "x2";
    p.equal_aspect = true;
    p.add(detail::polygon_series(circle_cover_n(set.radius, 720, set.center).points, "boundary", "#7f7f7f"));
    p.add(detail::point_series(cover.points, "cover", "#d62728"));
    ctx.write_svg("cover.svg", p);
  }
}

inline void cmd_bound(const Context & ctx)
{
  const auto & c = ctx.config;
  c.require_known(detail::keys({"L_bar", "H_bar", "L_under", "r", "s", "delta", "epsilon", "set_dim", "level"}));
  SmoothnessConstants k;
  k.L_bar = c.get_double("L_bar", 1.0);
  k.H_bar = c.get_double("H_bar", 0.0);
  k.r = c.get_double("r", 1.0);
  if (c.has("L_under")) k.L_under = c.get_double("L_under", 1.0);
  if (c.has("s")) k.s = c.get_double("s", 1.0);
  k.validate();
  const double delta = c.get_double("delta", 0.0);
  if (!c.has("delta")) throw ConfigError("missing required key 'delta'");

  nlohmann::json reports = nlohmann::json::array();
  std::vector<std::pair<std::string, double>> rows;
  auto add = [&](BoundKind kind) {
    const auto rep = make_report(kind, k, delta);
    reports.push_back(to_json(rep));
    rows.emplace_back(to_string(kind), rep.epsilon);
  };
  add(BoundKind::second_order);
  add(BoundKind::first_order);
  add(BoundKind::dumbgen);
  if (k.L_under && k.s) add(BoundKind::diffeo);

  nlohmann::json j{{"command", "bound"}, {"constants", to_json(k)}, {"delta", delta}, {"reports", reports}};
  if (c.has("epsilon")) {
    const double eps = c.get_double("epsilon", 0.0);
    const long dim = c.get_long("set_dim", 2);
    if (dim != 2 && dim != 3) throw ConfigError("set_dim must be 2 or 3");
    const auto set = SmoothSetDescriptor::ball(Vector::Zero(dim), k.r);
    const double level = c.get_double("level", 0.9);
    j["inverse"] = {
      {"epsilon", eps},
      {"level", level},
      {"delta_first_order", required_delta(k, eps, BoundOrder::first)},
      {"delta_second_order", required_delta(k, eps, BoundOrder::second)},
      {"samples_first_order", samples_for_probability(k, set, eps, BoundOrder::first, level)},
      {"samples_second_order", samples_for_probability(k, set, eps, BoundOrder::second, level)},
    };
  }
  if (ctx.wants("csv")) {
    ctx.write("bound.csv", [&](std::ostream & os) {
      os << std::setprecision(17) << "kind,epsilon\n";
      for (const auto & [name, e] : rows) os << name << ',' << e << '\n';
    });
  }
  if (ctx.wants("json")) ctx.write_json("bound.json", j);
}

inline void cmd_reach(const Context & ctx)
{
  const auto & c = ctx.config;
  c.require_known(detail::merge(
    detail::merge(detail::keys({"system", "M", "t", "steps", "controls", "dense_M", "radius"}), detail::kOcpKeys),
    detail::kQpKeys));
  const auto name = c.get_string("system", "linear2d");
  const long M = c.get_long("M", 100);
  const long dense_M = c.get_long("dense_M", 100000);
  OdeSystem sys;
  double t = c.get_double("t", 1.0);
  int steps = static_cast<int>(c.get_long("steps", 100));
  BoundaryCover cover;
  std::optional<Matrix> controls;
  if (name == "linear2d") {
    sys = linear_test_system(t);
    cover = fibonacci_sphere(M, sys.parameters.radius, sys.parameters.center, dense_M);
  } else if (name == "zero") {
    sys = zero_dynamics(2, c.get_double("radius", 1.0));
    cover = circle_cover_n(sys.parameters.radius, M);
  } else if (name == "double_integrator") {
    const auto prm = detail::ocp_params(c);
    if (c.has("controls")) {
      std::ifstream f(c.get_string("controls", ""));
      if (!f) throw ConfigError("cannot open controls file '" + c.get_string("controls", "") + "'");
      controls = read_controls_csv(f);
    } else {
      OcpOptions opt;
      opt.dense_M = dense_M;
      opt.qp = detail::qp_settings(c);
      const auto sol = solve_ocp(prm, M, opt);
      if (sol.qp.status != QpStatus::solved) throw CommandFailure(std::string("QP ") + to_string(sol.qp.status));
      controls = sol.controls;
    }
    if (!c.has("t")) t = prm.T;
    if (!c.has("steps")) steps = 10 * prm.T;
    sys = double_integrator(prm, *controls);
    cover = fibonacci_sphere(M, sys.parameters.radius, sys.parameters.center, dense_M);
  } else {
    throw ConfigError("unknown system '" + name + "' (expected linear2d, double_integrator or zero)");
  }
  const auto res = reach_hull_estimate(sys, cover, t, steps);
  if (ctx.wants("csv")) ctx.write("hull.csv", [&](std::ostream & os) { write_csv(os, res.hull); });
  if (ctx.wants("json")) {
    ctx.write_json("report.json", {{"command", "reach"}, {"system", sys.name}, {"t", t}, {"steps", steps},
                                   {"cover", detail::cover_json(cover)}, {"bound", to_json(res.report)},
                                   {"hull", to_json(res.hull)}});
  }
  if (ctx.wants("svg") && res.hull.dim() == 2) {
    svg::Plot p;
    p.title = "Reachable set hull at t = " + std::to_string(t);
    p.x_label = "y1";
    p.y_label = "y2";
    p.equal_aspect = true;
    p.add(detail::polygon_series(res.hull.vertices(), "hull", "#1f77b4"));
    p.add(detail::point_series(res.outputs, "flowed samples", "#d62728"));
    ctx.write_svg("reach.svg", p);
  }
}

inline void write_ocp_outputs(const Context & ctx, const OcpParams & prm, const OcpExperimentResult & res, long M,
                              const std::string & command)
{
  if (ctx.wants("csv")) {
    ctx.write("controls.csv", [&](std::ostream & os) { write_controls_csv(os, res.solution.controls); });
    ctx.write("ensemble.csv", [&](std::ostream & os) {
      write_ensemble_csv(os, prm, res.solution.controls, res.solution.cover.points);
    });
  }
  if (ctx.wants("json")) {
    auto j = to_json(res, M);
    j["command"] = command;
    ctx.write_json("report.json", j);
  }
  if (ctx.wants("svg")) ctx.write_svg("trajectory.svg", detail::ocp_plot(prm, res.solution));
}

inline OcpExperimentSettings ocp_settings(const Context & ctx, bool naive_default)
{
  const auto & c = ctx.config;
  c.require_known(detail::merge(
    detail::merge(detail::keys({"M", "epsilon", "use_reference_padding", "dense_M", "dense_draws", "naive_count"}),
                  detail::kOcpKeys),
    detail::kQpKeys));
  OcpExperimentSettings s;
  s.params = detail::ocp_params(c);
  s.M = c.get_long("M", 100);
  if (c.has("epsilon")) s.options.epsilon = c.get_double("epsilon", 0.0);
  s.options.use_reference_padding = c.get_bool("use_reference_padding", false);
  s.options.dense_M = c.get_long("dense_M", 100000);
  s.options.qp = detail::qp_settings(c);
  s.dense_draws = c.get_long("dense_draws", 1000);
  s.seed = ctx.seed;
  s.naive_count = c.get_bool("naive_count", naive_default);
  return s;
}

inline void cmd_solve_ocp(const Context & ctx)
{
  const auto s = ocp_settings(ctx, false);
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_ocp_experiment(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_ocp_outputs(ctx, s.params, res, s.M, "solve-ocp");
  std::cerr << "solve-ocp: " << to_string(res.solution.qp.status) << ", " << res.verification.violations
            << " violations, " << secs << " s\n";
  if (res.solution.qp.status != QpStatus::solved) {
    throw CommandFailure(std::string("QP ") + to_string(res.solution.qp.status));
  }
}

inline void cmd_experiment_ocp(const Context & ctx)
{
  const auto s = ocp_settings(ctx, true);
  const auto res = run_ocp_experiment(s);
  write_ocp_outputs(ctx, s.params, res, s.M, "experiment-ocp");
  if (res.solution.qp.status != QpStatus::solved) {
    throw CommandFailure(std::string("QP ") + to_string(res.solution.qp.status));
  }
}

inline void cmd_experiment_sensitivity(const Context & ctx)
{
  const auto & c = ctx.config;
  c.require_known(detail::keys({"L", "epsilon", "trials", "M_list", "proxy_points"}));
  SensitivitySettings s;
  s.L = c.get_double("L", s.L);
  s.epsilon = c.get_double("epsilon", s.epsilon);
  s.trials = c.get_long("trials", s.trials);
  s.M_list = c.get_long_list("M_list", s.M_list);
  s.proxy_points = c.get_long("proxy_points", s.proxy_points);
  s.seed = ctx.seed;
  const auto res = run_sensitivity(s);
  if (ctx.wants("csv")) ctx.write("sensitivity.csv", [&](std::ostream & os) { write_csv(os, res); });
  if (ctx.wants("json")) ctx.write_json("sensitivity.json", to_json(res));
  if (ctx.wants("svg")) {
    svg::Plot p;
    std::ostringstream title;
    title << "Success probability, L = " << s.L << ", epsilon = " << s.epsilon;
    p.title = title.str();
    p.x_label = "M";
    p.y_label = "P(d_H <= epsilon)";
    p.log_x = true;
    svg::Series b1{"first-order bound", "#ff7f0e", {}, {}, true, false, true};
    svg::Series b2{"second-order bound", "#1f77b4", {}, {}, true, false, true};
    svg::Series em{"empirical", "#2ca02c", {}, {}, true, false, false};
    for (const auto & r : res.rows) {
      for (auto * sr : {&b1, &b2, &em}) sr->x.push_back(static_cast<double>(r.M));
      b1.y.push_back(r.bound1);
      b2.y.push_back(r.bound2);
      em.y.push_back(r.empirical);
    }
    p.add(b1);
    p.add(b2);
    p.add(em);
    ctx.write_svg("sensitivity.svg", p);
  }
}

// ---------------------------------------------------------------------------

/// Parses arguments, runs one command and maps failures to exit codes.
inline int run(int argc, const char * const * argv)
{
  CLI::App app{"Certified convex hull estimation from boundary samples"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::vector<std::string> formats;

  auto add_common = [&](CLI::App * sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
    sub->add_option("--seed", seed, "random seed (overrides the config 'seed' key)");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--format", formats, "restrict outputs to these formats")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  };

  std::function<void(const Context &)> action;
  auto command = [&](const char * name, const char * help, void (*fn)(const Context &)) {
    auto * sub = app.add_subcommand(name, help);
    add_common(sub);
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };
  command("estimate-hull", "hull of mapped boundary samples with its error bound", cmd_estimate_hull);
  command("sample-cover", "boundary cover with its covering radius", cmd_sample_cover);
  command("bound", "evaluate and invert the error bounds", cmd_bound);
  command("reach", "reachable-set hull of a built-in system", cmd_reach);
  command("solve-ocp", "padded robust planning problem", cmd_solve_ocp);
  auto * exp = app.add_subcommand("experiment", "experiment drivers");
  exp->require_subcommand(1);
  auto * sens = exp->add_subcommand("sensitivity", "success probability versus sample size");
  add_common(sens);
  sens->callback([&action] { action = cmd_experiment_sensitivity; });
  auto * ocp = exp->add_subcommand("ocp", "robust planning with verification and naive sample count");
  add_common(ocp);
  ocp->callback([&action] { action = cmd_experiment_ocp; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e, std::cerr, std::cerr);
    return kExitConfig;
  }

  try {
    Context ctx;
    if (!config_path.empty()) ctx.config = Config::load(config_path);
    ctx.seed = seed ? *seed : static_cast<std::uint64_t>(ctx.config.get_long("seed", 0));
    ctx.out = out;
    if (!formats.empty()) ctx.formats = {formats.begin(), formats.end()};
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    if (ec || !std::filesystem::is_directory(ctx.out)) throw ConfigError("cannot create output directory '" + out + "'");
    action(ctx);
  } catch (const NumericalError & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvalidArgument & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error & e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace hullcert::cli

#endif  // HULLCERT_CLI_HPP_
