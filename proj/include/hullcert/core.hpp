#ifndef HULLCERT_CORE_HPP_
#define HULLCERT_CORE_HPP_

/**
 * @file
 * @brief Shared vocabulary: vector types, error hierarchy, tolerances and the
 * counter-based random number generator.
 */

#include <Eigen/Core>
#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hullcert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied data was violated.
class InvalidArgument : public Error
{
public:
  using Error::Error;
};

/// An iterative or numerical procedure failed to produce a trustworthy result.
class NumericalError : public Error
{
public:
  using Error::Error;
};

namespace tol {

/// Relative tolerance of the min-norm-point optimality certificate.
inline constexpr double kWolfe = 1e-10;

/// Scale-aware hull tolerance: 1e-9 * (1 + bounding-box diameter).
inline double hull(double bbox_diameter) { return 1e-9 * (1.0 + bbox_diameter); }

}  // namespace tol

/**
 * @brief Counter-based 64-bit generator.
 *
 * Output i of stream (seed, stream) is splitmix64(key + i * 0x9E3779B97F4A7C15) with
 * key = splitmix64(seed ^ splitmix64(stream + 0xD1B54A32D192ED03)). Every draw is
 * a pure function of (seed, stream, counter), so trial-indexed streams are
 * reproducible regardless of evaluation order.
 *
 * Satisfies UniformRandomBitGenerator. Uniform and normal variates are produced
 * by hand (53-bit mantissa, Box-Muller) so that results do not depend on the
 * standard library's distribution implementations.
 */
class CounterRng
{
public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + kStreamSalt)))
  {}

  static constexpr std::uint64_t mix(std::uint64_t z)
  {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal variate.
  double normal()
  {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * kPi * u2);
    has_spare_ = true;
    return rad * std::cos(2.0 * kPi * u2);
  }

  std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Uniform direction on the unit sphere S^{d-1} (normalized Gaussian).
inline Vector random_unit_vector(CounterRng & rng, Eigen::Index d)
{
  Vector v(d);
  double n = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.normal();
    n = v.norm();
  } while (n < 1e-300);
  return v / n;
}

}  // namespace hullcert

#endif  // HULLCERT_CORE_HPP_
