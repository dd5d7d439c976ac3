#ifndef HULLCERT_BOUNDS_HPP_
#define HULLCERT_BOUNDS_HPP_

/**
 * @file
 * @brief Closed-form Hausdorff error certificates for hull(f(samples)) and the
 * probabilistic covering guarantee of iid boundary sampling, with inversions.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hullcert/core.hpp"
#include "hullcert/covers.hpp"

namespace hullcert {

/// Lipschitz constants of (f, df, f^-1), smoothness radius r of X and optional neighbourhood radius s.
struct SmoothnessConstants
{
  double L_bar = 1.0;
  double H_bar = 0.0;
  std::optional<double> L_under;
  double r = 1.0;
  std::optional<double> s;

  void validate() const
  {
    if (!(L_bar > 0.0)) throw InvalidArgument("SmoothnessConstants: L_bar must be positive");
    if (!(H_bar >= 0.0)) throw InvalidArgument("SmoothnessConstants: H_bar must be non-negative");
    if (!(r > 0.0)) throw InvalidArgument("SmoothnessConstants: r must be positive");
    if (L_under && !(*L_under > 0.0)) throw InvalidArgument("SmoothnessConstants: L_under must be positive");
    if (s && !(*s > 0.0)) throw InvalidArgument("SmoothnessConstants: s must be positive");
  }

  /// Curvature-like factor L_bar / r + H_bar shared by the second-order bounds.
  double curvature() const { return L_bar / r + H_bar; }
};

enum class BoundKind { first_order, second_order, diffeo, dumbgen };

inline const char * to_string(BoundKind k)
{
  switch (k) {
    case BoundKind::first_order: return "first_order";
    case BoundKind::second_order: return "second_order";
    case BoundKind::diffeo: return "diffeo";
    case BoundKind::dumbgen: return "dumbgen";
  }
  return "?";
}

struct BoundReport
{
  double epsilon = 0.0;
  BoundKind kind = BoundKind::second_order;
  double delta = 0.0;
  SmoothnessConstants constants;
  bool certified = true;  ///< false when constants or delta were estimated
};

/// 1/2 (L_bar / r + H_bar) delta^2.
inline double bound_second_order(const SmoothnessConstants & c, double delta)
{
  c.validate();
  if (!(delta > 0.0)) throw InvalidArgument("bound_second_order: delta must be positive");
  return 0.5 * c.curvature() * (delta * delta);
}

/// Naive Lipschitz-covering bound L_bar * delta.
inline double bound_first_order(const SmoothnessConstants & c, double delta)
{
  c.validate();
  if (!(delta >= 0.0)) throw InvalidArgument("bound_first_order: delta must be non-negative");
  return c.L_bar * delta;
}

/// Bound through the reach of f(X) for diffeomorphisms: delta^2 (L_bar / r + H_bar)(L_under L_bar)^2 / 2.
inline double bound_diffeo(const SmoothnessConstants & c, double delta)
{
  c.validate();
  if (!c.L_under) throw InvalidArgument("bound_diffeo: L_under is required");
  if (!(delta > 0.0)) throw InvalidArgument("bound_diffeo: delta must be positive");
  const double k = *c.L_under * c.L_bar;
  return 0.5 * c.curvature() * k * k * delta * delta;
}

/// delta^2 / R for a set of reach R.
inline double bound_dumbgen(double R, double delta)
{
  if (!(R > 0.0)) throw InvalidArgument("bound_dumbgen: R must be positive");
  return (1.0 / R) * (delta * delta);
}

/// Lower bound on the reach of f(X): min(s / L_under, 1 / ((L_bar / r + H_bar) L_under^2)).
inline double reach_diffeo(const SmoothnessConstants & c)
{
  c.validate();
  if (!c.L_under || !c.s) throw InvalidArgument("reach_diffeo: L_under and s are required");
  const double lu = *c.L_under;
  return std::min(*c.s / lu, 1.0 / (c.curvature() * lu * lu));
}

inline BoundReport make_report(BoundKind kind, const SmoothnessConstants & c, double delta, bool certified = true)
{
  BoundReport rep;
  rep.kind = kind;
  rep.delta = delta;
  rep.constants = c;
  rep.certified = certified;
  switch (kind) {
    case BoundKind::first_order: rep.epsilon = bound_first_order(c, delta); break;
    case BoundKind::second_order: rep.epsilon = bound_second_order(c, delta); break;
    case BoundKind::diffeo: rep.epsilon = bound_diffeo(c, delta); break;
    case BoundKind::dumbgen: rep.epsilon = bound_dumbgen(c.r, delta); break;
  }
  return rep;
}

/// beta = N (1 - Lambda)^M; values above 1 are kept and flagged vacuous.
struct FailureProbability
{
  double beta = 0.0;
  bool vacuous = false;
};

/**
 * @brief Probability bound that M iid boundary samples fail to form a delta-cover,
 * N (1 - Lambda)^M, evaluated in log space.
 */
inline FailureProbability covering_failure_prob(long N, double Lambda, long M)
{
  if (N < 1 || M < 1) throw InvalidArgument("covering_failure_prob: N and M must be >= 1");
  if (!(Lambda > 0.0)) throw InvalidArgument("covering_failure_prob: Lambda must be positive");
  if (Lambda > 1.0) throw InvalidArgument("covering_failure_prob: Lambda must be <= 1");
  FailureProbability fp;
  if (Lambda >= 1.0) return fp;
  fp.beta = std::exp(std::log(static_cast<double>(N)) + static_cast<double>(M) * std::log1p(-Lambda));
  fp.vacuous = fp.beta > 1.0;
  return fp;
}

/// Smallest M with N (1 - Lambda)^M <= beta_target.
inline long min_samples(long N, double Lambda, double beta_target)
{
  if (!(beta_target > 0.0 && beta_target < 1.0)) throw InvalidArgument("min_samples: beta_target must be in (0,1)");
  if (!(Lambda > 0.0) || N < 1) throw InvalidArgument("min_samples: need Lambda > 0 and N >= 1");
  if (Lambda >= 1.0) return 1;
  const double x = std::log(beta_target / static_cast<double>(N)) / std::log1p(-Lambda);
  return std::max(1L, static_cast<long>(std::ceil(x * (1.0 - 1e-12))));
}

enum class BoundOrder { first, second };

/// Sampling radius delta that makes the chosen bound equal epsilon.
inline double required_delta(const SmoothnessConstants & c, double epsilon, BoundOrder order)
{
  c.validate();
  if (!(epsilon > 0.0)) throw InvalidArgument("required_delta: epsilon must be positive");
  return order == BoundOrder::first ? epsilon / c.L_bar : std::sqrt(2.0 * epsilon / c.curvature());
}

struct CurvePoint
{
  long M = 0;
  double probability = 0.0;  ///< 1 - beta clamped to [0, 1]
};

/**
 * @brief Guaranteed probability that hull(f(samples)) is epsilon-accurate, per sample size.
 *
 * Inverts the chosen bound for delta, evaluates Lambda and the covering
 * number at delta / 2 for the uniform boundary distribution of `set`, and
 * returns 1 - beta clamped to [0, 1].
 */
inline std::vector<CurvePoint> success_prob_curve(
  const SmoothnessConstants & c, const SmoothSetDescriptor & set, double epsilon, BoundOrder order,
  const std::vector<long> & M_list)
{
  const double delta = required_delta(c, epsilon, order);
  const double Lambda = lambda_uniform(set, delta);
  const long N = covering_number(set, 0.5 * delta);
  std::vector<CurvePoint> out;
  out.reserve(M_list.size());
  for (long M : M_list) {
    const auto fp = covering_failure_prob(N, Lambda, M);
    out.push_back({M, std::clamp(1.0 - fp.beta, 0.0, 1.0)});
  }
  return out;
}

/// Smallest M for which the chosen curve reaches probability `level`.
inline long samples_for_probability(
  const SmoothnessConstants & c, const SmoothSetDescriptor & set, double epsilon, BoundOrder order, double level)
{
  const double delta = required_delta(c, epsilon, order);
  return min_samples(covering_number(set, 0.5 * delta), lambda_uniform(set, delta), 1.0 - level);
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const SmoothnessConstants & c)
{
  nlohmann::json j{{"L_bar", c.L_bar}, {"H_bar", c.H_bar}, {"r", c.r}};
  j["L_under"] = c.L_under ? nlohmann::json(*c.L_under) : nlohmann::json(nullptr);
  j["s"] = c.s ? nlohmann::json(*c.s) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const BoundReport & rep)
{
  return {
    {"epsilon", rep.epsilon},
    {"kind", to_string(rep.kind)},
    {"delta", rep.delta},
    {"certified", rep.certified},
    {"constants", to_json(rep.constants)},
  };
}

}  // namespace hullcert

#endif  // HULLCERT_BOUNDS_HPP_
