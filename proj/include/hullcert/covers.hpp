#ifndef HULLCERT_COVERS_HPP_
#define HULLCERT_COVERS_HPP_

/**
 * @file
 * @brief Boundary covers of balls, spheres and their affine images: explicit
 * constructions, a dense-mesh covering-radius oracle, covering numbers and the
 * sampling-density constant of uniform boundary sampling.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "hullcert/core.hpp"
#include "hullcert/geometry.hpp"

namespace hullcert {

/// A ball B(center, r), its boundary sphere, or an affine image A * B(center, r) + offset.
struct SmoothSetDescriptor
{
  enum class Kind { ball, sphere_boundary_only, affine_image_of_ball };

  Kind kind = Kind::ball;
  Vector center;
  double radius = 1.0;
  Matrix A;       ///< only for affine_image_of_ball
  Vector offset;  ///< only for affine_image_of_ball

  static SmoothSetDescriptor ball(Vector c, double r)
  {
    SmoothSetDescriptor s{Kind::ball, std::move(c), r, {}, {}};
    s.validate();
    return s;
  }

  static SmoothSetDescriptor sphere(Vector c, double r)
  {
    SmoothSetDescriptor s{Kind::sphere_boundary_only, std::move(c), r, {}, {}};
    s.validate();
    return s;
  }

  static SmoothSetDescriptor affine_image(Matrix a, Vector b, Vector c, double r)
  {
    SmoothSetDescriptor s{Kind::affine_image_of_ball, std::move(c), r, std::move(a), std::move(b)};
    s.validate();
    return s;
  }

  /// Ambient dimension of the set.
  Eigen::Index dim() const { return kind == Kind::affine_image_of_ball ? A.rows() : center.size(); }

  /// Dimension of the underlying ball (pre-image space).
  Eigen::Index ball_dim() const { return center.size(); }

  void validate() const
  {
    if (!(radius > 0.0)) throw InvalidArgument("SmoothSetDescriptor: radius must be positive");
    if (center.size() < 1) throw InvalidArgument("SmoothSetDescriptor: empty center");
    if (kind == Kind::affine_image_of_ball) {
      if (A.rows() != A.cols() || A.cols() != center.size() || offset.size() != A.rows()) {
        throw InvalidArgument("SmoothSetDescriptor: affine map has inconsistent dimensions");
      }
      if (!Eigen::FullPivLU<Matrix>(A).isInvertible()) {
        throw InvalidArgument("SmoothSetDescriptor: affine matrix is singular");
      }
    }
  }

  /// Maps a point of the pre-image ball space into the set's ambient space.
  Vector embed(const Vector & z) const { return kind == Kind::affine_image_of_ball ? Vector(A * z + offset) : z; }

  /// Boundary point in direction u (unit vector of the pre-image ball).
  Vector boundary_point(const Vector & u) const { return embed(center + radius * u); }

  /// Operator norm of the embedding (1 for balls and spheres).
  double embedding_norm() const
  {
    if (kind != Kind::affine_image_of_ball) return 1.0;
    return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
  }
};

/// Finite point set on the boundary of a set with a covering radius delta.
struct BoundaryCover
{
  VertexCloud points;
  double delta = 0.0;       ///< certified (or conservatively estimated) covering radius
  bool certified = false;   ///< true when delta follows from a closed form
  bool degenerate = false;  ///< requested radius exceeded the set's diameter
  std::uint64_t seed = 0;
  double measured = -1.0;   ///< dense-mesh oracle value when one was computed

  Eigen::Index M() const { return points.size(); }
};

namespace detail {

/// Nearest-neighbour queries by a sorted sweep along the widest coordinate.
class SweepNearest
{
public:
  explicit SweepNearest(const Matrix & pts) : pts_(pts)
  {
    const Vector spread = pts.rowwise().maxCoeff() - pts.rowwise().minCoeff();
    spread.maxCoeff(&axis_);
    order_.resize(static_cast<std::size_t>(pts.cols()));
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
    std::stable_sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) {
      return pts(axis_, a) < pts(axis_, b);
    });
    key_.reserve(order_.size());
    for (auto i : order_) key_.push_back(pts(axis_, i));
  }

  double distance(const Vector & q) const
  {
    const double qk = q(axis_);
    const auto n = key_.size();
    const std::size_t mid = static_cast<std::size_t>(std::lower_bound(key_.begin(), key_.end(), qk) - key_.begin());
    double best2 = kInf;
    for (std::size_t i = mid; i < n; ++i) {
      const double dk = key_[i] - qk;
      if (dk * dk >= best2) break;
      best2 = std::min(best2, (pts_.col(order_[i]) - q).squaredNorm());
    }
    for (std::size_t i = mid; i-- > 0;) {
      const double dk = qk - key_[i];
      if (dk * dk >= best2) break;
      best2 = std::min(best2, (pts_.col(order_[i]) - q).squaredNorm());
    }
    return std::sqrt(best2);
  }

private:
  const Matrix & pts_;
  Eigen::Index axis_ = 0;
  std::vector<Eigen::Index> order_;
  std::vector<double> key_;
};

/// Latitude/longitude ring layout of the unit sphere with an analytic covering bound.
struct SphereRings
{
  int rings = 1;
  std::vector<int> per_ring;
  double cover_bound = 0.0;  ///< every unit-sphere point lies within this chord of a mesh point

  explicit SphereRings(int n) : rings(std::max(n, 1))
  {
    const double dth = kPi / rings;
    for (int j = 0; j < rings; ++j) {
      const double th = (j + 0.5) * dth;
      const double s = std::sin(th);
      const int k = std::max(1, static_cast<int>(std::ceil(2.0 * kPi * s / dth)));
      per_ring.push_back(k);
      // |P-Q|^2 <= (dth/2)^2 + sin(theta) sin(theta_j) (pi/k)^2 with sin(theta) <= sin(theta_j) + dth/2.
      const double dphi = kPi / k;
      const double b2 = 0.25 * dth * dth + std::min(1.0, s + 0.5 * dth) * s * dphi * dphi;
      cover_bound = std::max(cover_bound, std::sqrt(b2));
    }
  }

  long total() const
  {
    long t = 0;
    for (int k : per_ring) t += k;
    return t;
  }

  static SphereRings for_count(long target)
  {
    return SphereRings(static_cast<int>(std::lround(std::sqrt(kPi * static_cast<double>(target) / 4.0))));
  }

  /// Unit vectors of the mesh.
  Matrix points() const
  {
    Matrix m(3, total());
    Eigen::Index c = 0;
    const double dth = kPi / rings;
    for (int j = 0; j < rings; ++j) {
      const double th = (j + 0.5) * dth;
      const int k = per_ring[static_cast<std::size_t>(j)];
      for (int i = 0; i < k; ++i) {
        const double ph = 2.0 * kPi * i / k;
        m.col(c++) << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
      }
    }
    return m;
  }
};

inline void require_ball_like(const SmoothSetDescriptor & set, const char * who)
{
  if (set.ball_dim() != 2 && set.ball_dim() != 3) {
    throw InvalidArgument(std::string(who) + ": only circles and 2-spheres are supported");
  }
}

}  // namespace detail

/// Deterministic mesh of the boundary together with its own covering radius bound.
struct BoundaryMesh
{
  VertexCloud points;
  double resolution = 0.0;  ///< every boundary point is within this distance of a mesh point
};

/**
 * @brief Dense deterministic boundary mesh with about dense_M points.
 *
 * Circles use dense_M equally spaced angles starting at 0; spheres use
 * latitude rings. Affine images inflate the resolution by the operator norm.
 */
inline BoundaryMesh boundary_mesh(const SmoothSetDescriptor & set, long dense_M)
{
  detail::require_ball_like(set, "boundary_mesh");
  if (dense_M < 1) throw InvalidArgument("boundary_mesh: dense_M must be positive");
  Matrix unit;
  double res = 0.0;
  if (set.ball_dim() == 2) {
    unit.resize(2, dense_M);
    for (long k = 0; k < dense_M; ++k) {
      const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(dense_M);
      unit.col(k) << std::cos(a), std::sin(a);
    }
    res = 2.0 * std::sin(kPi / (2.0 * static_cast<double>(dense_M)));
  } else {
    const auto rings = detail::SphereRings::for_count(dense_M);
    unit = rings.points();
    res = rings.cover_bound;
  }
  Matrix pts(set.dim(), unit.cols());
  for (Eigen::Index c = 0; c < unit.cols(); ++c) pts.col(c) = set.boundary_point(unit.col(c));
  return {VertexCloud(std::move(pts)), res * set.radius * set.embedding_norm()};
}

/**
 * @brief Dense-mesh covering radius: max over mesh points of the distance to
 * the nearest cover point.
 *
 * A lower bound on the true covering radius that converges as dense_M grows;
 * adding the mesh resolution turns it into an upper bound.
 */
inline double covering_radius(const BoundaryCover & cover, const SmoothSetDescriptor & set, long dense_M)
{
  if (dense_M < 1000) throw InvalidArgument("covering_radius: dense_M must be >= 1000");
  if (cover.points.dim() != set.dim()) throw InvalidArgument("covering_radius: dimension mismatch");
  const auto mesh = boundary_mesh(set, dense_M);
  const detail::SweepNearest nn(cover.points.matrix());
  double worst = 0.0;
  for (Eigen::Index c = 0; c < mesh.points.size(); ++c) worst = std::max(worst, nn.distance(mesh.points.point(c)));
  return worst;
}

/// Upper bound on the covering radius: dense-mesh oracle plus the mesh resolution.
inline double certified_covering_radius(const BoundaryCover & cover, const SmoothSetDescriptor & set, long dense_M)
{
  return covering_radius(cover, set, dense_M) + boundary_mesh(set, dense_M).resolution;
}

/// N equally spaced points on the circle of radius r, first point at angle 0.
inline BoundaryCover circle_cover_n(double r, long N, const Vector & center = Vector::Zero(2))
{
  if (!(r > 0.0) || N < 1) throw InvalidArgument("circle_cover_n: need r > 0 and N >= 1");
  Matrix m(2, N);
  for (long k = 0; k < N; ++k) {
    const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(N);
    m.col(k) = center + r * Eigen::Vector2d(std::cos(a), std::sin(a));
  }
  BoundaryCover cov;
  cov.points = VertexCloud(std::move(m));
  // Farthest circle point sits half a spacing from its nearest cover point.
  cov.delta = N == 1 ? 2.0 * r : 2.0 * r * std::sin(kPi / (2.0 * static_cast<double>(N)));
  cov.certified = true;
  return cov;
}

/**
 * @brief Fewest equally spaced circle points with covering radius <= delta.
 *
 * N = ceil(pi / (2 asin(delta / 2r))), so that the half-spacing alpha = pi / N
 * satisfies 2 r sin(alpha / 2) <= delta. The returned delta is the requested
 * one. delta >= 2r is flagged degenerate and answered with a quarter-turn
 * 4-point cover.
 */
inline BoundaryCover circle_cover(double r, double delta, const Vector & center = Vector::Zero(2))
{
  if (!(r > 0.0) || !(delta > 0.0)) throw InvalidArgument("circle_cover: need r > 0 and delta > 0");
  if (delta >= 2.0 * r) {
    auto cov = circle_cover_n(r, 4, center);
    cov.delta = delta;
    cov.degenerate = true;
    return cov;
  }
  const double x = kPi / (2.0 * std::asin(delta / (2.0 * r)));
  auto N = static_cast<long>(std::ceil(x * (1.0 - 1e-12)));
  N = std::max(N, 2L);
  auto cov = circle_cover_n(r, N, center);
  cov.delta = delta;
  return cov;
}

/// Unit-sphere Fibonacci lattice: z_i = 1 - 2(i + 1/2)/M, phi_i = 2 pi i / golden ratio.
inline Matrix fibonacci_unit_points(long M)
{
  const double golden = std::numbers::phi;
  Matrix m(3, M);
  for (long i = 0; i < M; ++i) {
    const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(M);
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ph = 2.0 * kPi * static_cast<double>(i) / golden;
    m.col(i) << rho * std::cos(ph), rho * std::sin(ph), z;
  }
  return m;
}

/**
 * @brief Fibonacci lattice of M points on the sphere of radius r.
 *
 * Not certified: delta is the dense-mesh oracle value inflated by the mesh
 * resolution, which is an upper bound on the covering radius.
 */
inline BoundaryCover fibonacci_sphere(
  long M, double r, const Vector & center = Vector::Zero(3), long dense_M = 100000)
{
  if (M < 2 || !(r > 0.0)) throw InvalidArgument("fibonacci_sphere: need M >= 2 and r > 0");
  Matrix m = (r * fibonacci_unit_points(M)).colwise() + center;
  BoundaryCover cov;
  cov.points = VertexCloud(std::move(m));
  cov.certified = false;
  const auto set = SmoothSetDescriptor::sphere(center, r);
  cov.measured = covering_radius(cov, set, dense_M);
  cov.delta = cov.measured + boundary_mesh(set, dense_M).resolution;
  return cov;
}

/**
 * @brief Sampling-density constant of the uniform boundary distribution:
 * the probability mass of a boundary ball of radius delta/2.
 *
 * Circle: 2 asin(delta / 4r) / pi. Sphere: (1 - cos(2 asin(delta / 4r))) / 2.
 * The asin argument is clamped to 1.
 */
inline double lambda_uniform(const SmoothSetDescriptor & set, double delta)
{
  if (set.kind == SmoothSetDescriptor::Kind::affine_image_of_ball) {
    throw InvalidArgument("lambda_uniform: only balls and spheres have a closed form");
  }
  if (!(delta > 0.0)) throw InvalidArgument("lambda_uniform: delta must be positive");
  const double a = std::asin(std::min(1.0, delta / (4.0 * set.radius)));
  if (set.ball_dim() == 2) return 2.0 * a / kPi;
  if (set.ball_dim() == 3) return 0.5 * (1.0 - std::cos(2.0 * a));
  throw InvalidArgument("lambda_uniform: dimension must be 2 or 3");
}

/**
 * @brief Upper bound on the internal delta_half-covering number of a circle:
 * ceil(pi / asin(delta_half / 2r)), and 1 once delta_half reaches the diameter.
 */
inline long covering_number_circle(double r, double delta_half)
{
  if (!(delta_half > 0.0) || !(r > 0.0)) throw InvalidArgument("covering_number_circle: need positive inputs");
  if (delta_half >= 2.0 * r) return 1;
  return static_cast<long>(std::ceil(kPi / std::asin(delta_half / (2.0 * r)) * (1.0 - 1e-12)));
}

/// Constructive upper bound on the delta_half-covering number of a 2-sphere (latitude rings).
inline long covering_number_sphere(double r, double delta_half)
{
  if (!(delta_half > 0.0) || !(r > 0.0)) throw InvalidArgument("covering_number_sphere: need positive inputs");
  if (delta_half >= 2.0 * r) return 1;
  int n = 1;
  while (detail::SphereRings(n).cover_bound * r > delta_half) n = std::max(n + 1, static_cast<int>(n * 1.05));
  // Step back to the smallest certifying ring count.
  while (n > 1 && detail::SphereRings(n - 1).cover_bound * r <= delta_half) --n;
  return detail::SphereRings(n).total();
}

/// Covering number of a ball/sphere boundary of dimension 2 or 3.
inline long covering_number(const SmoothSetDescriptor & set, double delta_half)
{
  detail::require_ball_like(set, "covering_number");
  return set.ball_dim() == 2 ? covering_number_circle(set.radius, delta_half)
                             : covering_number_sphere(set.radius, delta_half);
}

/// M iid uniform points of the boundary (angle for circles, normalized Gaussians for spheres).
inline VertexCloud sample_boundary_uniform(
  const SmoothSetDescriptor & set, long M, std::uint64_t seed, std::uint64_t stream = 0)
{
  if (M < 1) throw InvalidArgument("sample_boundary_uniform: M must be >= 1");
  CounterRng rng(seed, stream);
  Matrix m(set.dim(), M);
  for (long i = 0; i < M; ++i) {
    Vector u;
    if (set.ball_dim() == 2) {
      const double a = 2.0 * kPi * rng.uniform();
      u = Eigen::Vector2d(std::cos(a), std::sin(a));
    } else {
      u = random_unit_vector(rng, set.ball_dim());
    }
    m.col(i) = set.boundary_point(u);
  }
  return VertexCloud(std::move(m));
}

/// M iid uniform points of the solid ball (pre-image ball for affine images).
inline VertexCloud sample_ball_uniform(
  const SmoothSetDescriptor & set, long M, std::uint64_t seed, std::uint64_t stream = 0)
{
  if (M < 1) throw InvalidArgument("sample_ball_uniform: M must be >= 1");
  CounterRng rng(seed, stream);
  const auto d = set.ball_dim();
  Matrix m(set.dim(), M);
  for (long i = 0; i < M; ++i) {
    const Vector u = random_unit_vector(rng, d);
    const double rad = set.radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
    m.col(i) = set.embed(set.center + rad * u);
  }
  return VertexCloud(std::move(m));
}

// ---------------------------------------------------------------------------
// Serialization: x1..xd columns followed by the cover metadata repeated per row.

inline void write_csv(std::ostream & os, const BoundaryCover & cover)
{
  os << std::setprecision(17);
  const auto d = cover.points.dim();
  for (Eigen::Index r = 0; r < d; ++r) os << 'x' << (r + 1) << ',';
  os << "delta,certified,M,seed\n";
  for (Eigen::Index c = 0; c < cover.M(); ++c) {
    for (Eigen::Index r = 0; r < d; ++r) os << cover.points.matrix()(r, c) << ',';
    os << cover.delta << ',' << (cover.certified ? 1 : 0) << ',' << cover.M() << ',' << cover.seed << '\n';
  }
}

inline BoundaryCover read_cover_csv(std::istream & is)
{
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("read_cover_csv: missing header");
  const auto cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  const Eigen::Index d = cols - 4;
  if (d < 1) throw InvalidArgument("read_cover_csv: malformed header");
  BoundaryCover cov;
  std::vector<Vector> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vector p(d);
    for (Eigen::Index r = 0; r < d; ++r) {
      std::getline(ss, cell, ',');
      p(r) = std::stod(cell);
    }
    std::getline(ss, cell, ',');
    cov.delta = std::stod(cell);
    std::getline(ss, cell, ',');
    cov.certified = cell == "1";
    std::getline(ss, cell, ',');
    std::getline(ss, cell, ',');
    cov.seed = std::stoull(cell);
    pts.push_back(std::move(p));
  }
  cov.points = VertexCloud(pts);
  return cov;
}

}  // namespace hullcert

#endif  // HULLCERT_COVERS_HPP_
