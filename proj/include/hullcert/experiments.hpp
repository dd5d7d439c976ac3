#ifndef HULLCERT_EXPERIMENTS_HPP_
#define HULLCERT_EXPERIMENTS_HPP_

/**
 * @file
 * @brief Experiment drivers: sample-size sensitivity of the hull error on a
 * mapped disk, and the end-to-end robust planning run.
 */

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "hullcert/bounds.hpp"
#include "hullcert/covers.hpp"
#include "hullcert/geometry.hpp"
#include "hullcert/maps.hpp"
#include "hullcert/robustopt.hpp"

namespace hullcert {

struct SensitivitySettings
{
  double L = 1.0;
  double epsilon = 1e-2;
  long trials = 100;
  std::vector<long> M_list = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
  long proxy_points = 100000;
  std::uint64_t seed = 0;
};

struct SensitivityRow
{
  long M = 0;
  double bound1 = 0.0;     ///< first-order guaranteed success probability
  double bound2 = 0.0;     ///< second-order guaranteed success probability
  double empirical = 0.0;  ///< fraction of trials with d_H <= epsilon
  double proxy_err = 0.0;  ///< bound on how much the dense proxy underestimates d_H
  double mean_dH = 0.0;
};

struct SensitivityResult
{
  SensitivitySettings settings;
  SmoothnessConstants constants;
  std::vector<SensitivityRow> rows;
  long M90_first = 0;   ///< smallest M with first-order probability >= 0.9
  long M90_second = 0;  ///< smallest M with second-order probability >= 0.9
};

/// d_H between hull(proxy hull vertices, f(samples)) and hull(f(samples)).
inline double scaled_disk_hausdorff(const SmoothMapDescriptor & f, const Polytope & proxy_hull, const VertexCloud & samples)
{
  const VertexCloud img = f.apply(samples);
  Matrix outer(img.dim(), proxy_hull.vertices().size() + img.size());
  outer << proxy_hull.vertices().matrix(), img.matrix();
  return hausdorff_nested(VertexCloud(std::move(outer)), Polytope::from_cloud(img));
}

/**
 * @brief Uniform boundary samples of the unit disk mapped by (x, y) -> (L x, y).
 *
 * Trial k at sample size M draws from the stream (M, k) of the seed, so rows
 * are independent of the order in which M values are listed.
 */
inline SensitivityResult run_sensitivity(const SensitivitySettings & s)
{
  if (!(s.L > 0.0) || !(s.epsilon > 0.0) || s.trials < 1 || s.M_list.empty() || s.proxy_points < 1000) {
    throw InvalidArgument("run_sensitivity: need L > 0, epsilon > 0, trials >= 1, M values and proxy_points >= 1000");
  }
  for (long M : s.M_list) {
    if (M < 3) throw InvalidArgument("run_sensitivity: every M must be >= 3");
  }
  SensitivityResult res;
  res.settings = s;
  const auto set = SmoothSetDescriptor::ball(Vector::Zero(2), 1.0);
  const auto f = map_scaling(s.L);
  res.constants = constants_on(f, set);
  const auto c1 = success_prob_curve(res.constants, set, s.epsilon, BoundOrder::first, s.M_list);
  const auto c2 = success_prob_curve(res.constants, set, s.epsilon, BoundOrder::second, s.M_list);
  res.M90_first = samples_for_probability(res.constants, set, s.epsilon, BoundOrder::first, 0.9);
  res.M90_second = samples_for_probability(res.constants, set, s.epsilon, BoundOrder::second, 0.9);

  const auto proxy = circle_cover_n(1.0, s.proxy_points);
  const auto proxy_hull = Polytope::from_cloud(f.apply(proxy.points));
  const double proxy_err = bound_second_order(res.constants, proxy.delta);

  for (std::size_t j = 0; j < s.M_list.size(); ++j) {
    const long M = s.M_list[j];
    long hits = 0;
    double sum = 0.0;
    for (long k = 0; k < s.trials; ++k) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(M) << 32) ^ static_cast<std::uint64_t>(k);
      const auto samples = sample_boundary_uniform(set, M, s.seed, stream);
      const double d = scaled_disk_hausdorff(f, proxy_hull, samples);
      sum += d;
      if (d <= s.epsilon) ++hits;
    }
    SensitivityRow row;
    row.M = M;
    row.bound1 = c1[j].probability;
    row.bound2 = c2[j].probability;
    row.empirical = static_cast<double>(hits) / static_cast<double>(s.trials);
    row.proxy_err = proxy_err;
    row.mean_dH = sum / static_cast<double>(s.trials);
    res.rows.push_back(row);
  }
  return res;
}

inline void write_csv(std::ostream & os, const SensitivityResult & res)
{
  os << std::setprecision(17) << "M,bound1,bound2,empirical,proxy_err\n";
  for (const auto & r : res.rows) {
    os << r.M << ',' << r.bound1 << ',' << r.bound2 << ',' << r.empirical << ',' << r.proxy_err << '\n';
  }
}

inline nlohmann::json to_json(const SensitivityResult & res)
{
  nlohmann::json rows = nlohmann::json::array();
  for (const auto & r : res.rows) {
    rows.push_back({{"M", r.M}, {"bound1", r.bound1}, {"bound2", r.bound2}, {"empirical", r.empirical},
                    {"proxy_err", r.proxy_err}, {"mean_dH", r.mean_dH}});
  }
  return {
    {"command", "experiment-sensitivity"},
    {"L", res.settings.L},
    {"epsilon", res.settings.epsilon},
    {"trials", res.settings.trials},
    {"seed", res.settings.seed},
    {"proxy_points", res.settings.proxy_points},
    {"constants", to_json(res.constants)},
    {"M90_first", res.M90_first},
    {"M90_second", res.M90_second},
    {"rows", rows},
  };
}

struct OcpExperimentSettings
{
  OcpParams params;
  long M = 100;
  OcpOptions options;
  long dense_draws = 1000;
  std::uint64_t seed = 0;
  bool naive_count = true;
};

struct OcpExperimentResult
{
  OcpSolution solution;
  ViolationReport verification;
  std::optional<NaiveCount> naive;
  double epsilon_discrepancy = 0.0;  ///< recomputed epsilon minus the 0.025 reference
};

inline OcpExperimentResult run_ocp_experiment(const OcpExperimentSettings & s)
{
  OcpExperimentResult res;
  res.solution = solve_ocp(s.params, s.M, s.options);
  res.verification = verify_feasibility(res.solution.controls, s.params, s.dense_draws, s.seed, res.solution.cover.points);
  if (s.naive_count && s.params.F_max > 0.0) {
    res.naive = naive_sample_count_detail(s.params, res.solution.reference_epsilon, s.options.dense_M);
  }
  res.epsilon_discrepancy = res.solution.recomputed_epsilon - res.solution.reference_epsilon;
  return res;
}

inline nlohmann::json to_json(const OcpExperimentResult & res, long M)
{
  const auto & sol = res.solution;
  nlohmann::json j{
    {"M", M},
    {"qp_status", to_string(sol.qp.status)},
    {"qp_iterations", sol.qp.iterations},
    {"objective", sol.qp.objective},
    {"primal_residual", sol.qp.primal_res},
    {"dual_residual", sol.qp.dual_res},
    {"rows", sol.rows},
    {"epsilon", sol.epsilon},
    {"recomputed_epsilon", sol.recomputed_epsilon},
    {"reference_epsilon", sol.reference_epsilon},
    {"epsilon_discrepancy", res.epsilon_discrepancy},
    {"padding_sufficient", sol.padding_sufficient},
    {"cover_delta", sol.cover.delta},
    {"cover_measured_radius", sol.cover.measured},
    {"cover_certified", sol.cover.certified},
    {"bound", to_json(sol.report)},
    {"verification", to_json(res.verification)},
  };
  if (res.naive) {
    j["naive_count"] = {{"M", res.naive->M}, {"delta_required", res.naive->delta_required},
                        {"achieved_radius", res.naive->achieved}, {"epsilon", sol.reference_epsilon}};
  } else {
    j["naive_count"] = nullptr;
  }
  return j;
}

}  // namespace hullcert

#endif  // HULLCERT_EXPERIMENTS_HPP_
