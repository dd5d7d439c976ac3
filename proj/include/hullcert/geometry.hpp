#ifndef HULLCERT_GEOMETRY_HPP_
#define HULLCERT_GEOMETRY_HPP_

/**
 * @file
 * @brief Convex hulls in vertex representation, minimum-norm points (Wolfe),
 * support functions and Hausdorff distances between nested convex hulls.
 *
 * Hulls are never stored as facet lattices. In two dimensions the extreme
 * points are computed exactly (monotone chain); in higher dimensions a
 * Polytope keeps the deduplicated cloud and prunes interior points on demand
 * with min-norm-point projections.
 */

#include <algorithm>
#include <cstddef>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hullcert/core.hpp"

namespace hullcert {

/// Finite, non-empty set of points of a common dimension, stored column-wise.
class VertexCloud
{
public:
  VertexCloud() = default;

  explicit VertexCloud(Matrix points) : pts_(std::move(points))
  {
    if (pts_.rows() < 1 || pts_.cols() < 1) {
      throw InvalidArgument("VertexCloud: needs at least one point of dimension >= 1");
    }
  }

  explicit VertexCloud(const std::vector<Vector> & points)
  {
    if (points.empty()) throw InvalidArgument("VertexCloud: empty point list");
    const auto d = points.front().size();
    if (d < 1) throw InvalidArgument("VertexCloud: zero-dimensional points");
    pts_.resize(d, static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != d) throw InvalidArgument("VertexCloud: mixed point dimensions");
      pts_.col(static_cast<Eigen::Index>(i)) = points[i];
    }
  }

  Eigen::Index dim() const { return pts_.rows(); }
  Eigen::Index size() const { return pts_.cols(); }
  bool empty() const { return pts_.cols() == 0; }

  auto point(Eigen::Index i) const { return pts_.col(i); }
  const Matrix & matrix() const { return pts_; }

  double bbox_diameter() const
  {
    if (empty()) return 0.0;
    return (pts_.rowwise().maxCoeff() - pts_.rowwise().minCoeff()).norm();
  }

  VertexCloud translated(const Vector & shift) const
  {
    VertexCloud out;
    out.pts_ = pts_.colwise() + shift;
    return out;
  }

  /// Cloud made of the selected columns, in the given order.
  VertexCloud subset(const std::vector<Eigen::Index> & idx) const
  {
    Matrix m(dim(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = pts_.col(idx[k]);
    return VertexCloud(std::move(m));
  }

private:
  Matrix pts_;
};

/// Unit-norm direction, |‖u‖ - 1| <= 1e-12.
class Direction
{
public:
  explicit Direction(Vector u) : u_(std::move(u))
  {
    if (u_.size() < 1 || std::abs(u_.norm() - 1.0) > 1e-12) {
      throw InvalidArgument("Direction: vector is not unit-norm");
    }
  }

  static Direction normalized(const Vector & v)
  {
    const double n = v.norm();
    if (!(n > 0.0)) throw InvalidArgument("Direction: zero vector");
    return Direction(v / n);
  }

  const Vector & vector() const { return u_; }
  Eigen::Index dim() const { return u_.size(); }

private:
  Vector u_;
};

namespace detail {

inline double cross2(const Eigen::Vector2d & o, const Eigen::Vector2d & a, const Eigen::Vector2d & b)
{
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

inline double segment_distance(
  const Eigen::Vector2d & a, const Eigen::Vector2d & b, const Eigen::Vector2d & p)
{
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

/// Indices of the cloud with near-duplicates (within tol, lexicographic neighbours) removed.
inline std::vector<Eigen::Index> dedup_indices(const VertexCloud & cloud, double tol)
{
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(cloud.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  const Matrix & m = cloud.matrix();
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (m(r, a) != m(r, b)) return m(r, a) < m(r, b);
    }
    return false;
  });
  std::vector<Eigen::Index> out;
  out.reserve(idx.size());
  for (auto i : idx) {
    if (!out.empty() && (m.col(i) - m.col(out.back())).norm() <= tol) continue;
    out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Result of a minimum-norm-point computation.
struct MinNormResult
{
  Vector point;
  double norm = 0.0;
  Vector weights;  ///< barycentric weights over the generators
  int iterations = 0;
};

/// Wolfe's algorithm ran out of iterations; carries the best iterate found.
class WolfeNonConvergence : public NumericalError
{
public:
  WolfeNonConvergence(Vector best, double residual)
      : NumericalError("min_norm_point: no convergence (residual " + std::to_string(residual) + ")"),
        best_(std::move(best)),
        residual_(residual)
  {}

  const Vector & best() const { return best_; }
  double residual() const { return residual_; }

private:
  Vector best_;
  double residual_;
};

/**
 * @brief Point of minimum Euclidean norm in conv(cloud), by Wolfe's algorithm.
 *
 * The linear-minimization step breaks ties by lowest index. Terminates when
 * <w, q - w> >= -kWolfe * (1 + |q|^2) for every generator q, which is then a
 * certificate of optimality. Throws WolfeNonConvergence after
 * 10 * size + 1000 iterations.
 */
inline MinNormResult min_norm_point(const VertexCloud & cloud)
{
  const Matrix & P = cloud.matrix();
  const Eigen::Index n = P.cols();
  const Vector sq = P.colwise().squaredNorm().transpose();
  const int max_iter = static_cast<int>(10 * n + 1000);

  Eigen::Index j0 = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (sq(i) < sq(j0)) j0 = i;
  }
  std::vector<Eigen::Index> S{j0};
  std::vector<double> lam{1.0};
  Vector x = P.col(j0);

  auto assemble = [&]() {
    Vector w = Vector::Zero(P.rows());
    for (std::size_t k = 0; k < S.size(); ++k) w += lam[k] * P.col(S[k]);
    return w;
  };
  auto finish = [&](int iters) {
    MinNormResult res;
    res.point = x;
    res.norm = x.norm();
    res.weights = Vector::Zero(n);
    for (std::size_t k = 0; k < S.size(); ++k) res.weights(S[k]) += lam[k];
    res.iterations = iters;
    return res;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    const Vector g = P.transpose() * x;
    const double xx = x.squaredNorm();
    Eigen::Index j = 0;
    double worst = kInf;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (g(i) < g(j)) j = i;
      worst = std::min(worst, g(i) - xx + tol::kWolfe * (1.0 + sq(i)));
    }
    if (worst >= 0.0) return finish(iter);
    if (std::find(S.begin(), S.end(), j) != S.end()) {
      // Floating-point stall: the corral cannot be improved further.
      if (g(j) - xx >= -1e3 * tol::kWolfe * (1.0 + sq(j))) return finish(iter);
      throw WolfeNonConvergence(x, xx - g(j));
    }
    S.push_back(j);
    lam.push_back(0.0);

    // Minor cycle: move towards the affine minimizer of the corral.
    for (;;) {
      const auto k = static_cast<Eigen::Index>(S.size());
      Vector alpha(k);
      if (k == 1) {
        alpha(0) = 1.0;
      } else {
        Matrix D(P.rows(), k - 1);
        for (Eigen::Index c = 1; c < k; ++c) D.col(c - 1) = P.col(S[c]) - P.col(S[0]);
        const Vector beta = D.colPivHouseholderQr().solve(-P.col(S[0]));
        alpha(0) = 1.0 - beta.sum();
        alpha.tail(k - 1) = beta;
      }
      if ((alpha.array() > 1e-14).all()) {
        for (Eigen::Index c = 0; c < k; ++c) lam[c] = alpha(c);
        x = assemble();
        break;
      }
      double theta = 1.0;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (alpha(c) <= 1e-14) {
          const double den = lam[c] - alpha(c);
          if (den > 0.0) theta = std::min(theta, lam[c] / den);
        }
      }
      for (Eigen::Index c = 0; c < k; ++c) lam[c] = theta * alpha(c) + (1.0 - theta) * lam[c];
      std::vector<Eigen::Index> S2;
      std::vector<double> lam2;
      for (Eigen::Index c = 0; c < k; ++c) {
        if (lam[c] > 1e-14) {
          S2.push_back(S[c]);
          lam2.push_back(lam[c]);
        }
      }
      if (S2.empty()) {
        S2.push_back(S.back());
        lam2.push_back(1.0);
      }
      const double total = std::accumulate(lam2.begin(), lam2.end(), 0.0);
      for (auto & l : lam2) l /= total;
      S = std::move(S2);
      lam = std::move(lam2);
      x = assemble();
      if (++iter >= max_iter) {
        throw WolfeNonConvergence(x, -((P.transpose() * x).minCoeff() - x.squaredNorm()));
      }
    }
  }
  throw WolfeNonConvergence(x, -((P.transpose() * x).minCoeff() - x.squaredNorm()));
}

/**
 * @brief Convex polytope in vertex representation.
 *
 * For dim <= 2 the vertices are exactly the extreme points (counter-clockwise
 * in 2D). For dim >= 3 the vertices are the deduplicated input cloud until
 * pruned() removes the interior points.
 */
class Polytope
{
public:
  Polytope() = default;

  /// Builds the hull of a cloud (see class comment for the dimension split).
  static Polytope from_cloud(const VertexCloud & cloud);

  const VertexCloud & vertices() const { return verts_; }
  Eigen::Index dim() const { return verts_.dim(); }
  Eigen::Index size() const { return verts_.size(); }

  /// True when every stored vertex is known to be extreme.
  bool extreme_only() const { return extreme_only_; }

  /// Copy with non-extreme vertices removed (no-op for dim <= 2).
  Polytope pruned() const;

private:
  Polytope(VertexCloud v, bool extreme_only) : verts_(std::move(v)), extreme_only_(extreme_only) {}

  VertexCloud verts_;
  bool extreme_only_ = false;

  friend Polytope convex_hull_2d(const VertexCloud & cloud);
};

/**
 * @brief Extreme points of a planar cloud, counter-clockwise (Andrew's monotone chain).
 *
 * Points within tau_hull of each other are merged and vertices within tau_hull
 * of the chord of their neighbours are dropped. Collinear and single-point
 * inputs return the 2- or 1-vertex degenerate polytope.
 */
inline Polytope convex_hull_2d(const VertexCloud & cloud)
{
  if (cloud.dim() != 2) throw InvalidArgument("convex_hull_2d: cloud is not planar");
  const double tau = tol::hull(cloud.bbox_diameter());
  const auto idx = detail::dedup_indices(cloud, tau);
  std::vector<Eigen::Vector2d> p;
  p.reserve(idx.size());
  for (auto i : idx) p.emplace_back(cloud.point(i));

  if (p.size() <= 2) {
    Matrix m(2, static_cast<Eigen::Index>(p.size()));
    for (std::size_t k = 0; k < p.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = p[k];
    return Polytope(VertexCloud(std::move(m)), true);
  }

  // Pops the middle point when it lies within roundoff of (or right of) the chord. Popping with tau
  // itself would let the error build up along densely sampled arcs.
  const double turn_tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(cloud.bbox_diameter(), 1e-300);
  auto keeps_left_turn = [turn_tol](const Eigen::Vector2d & o, const Eigen::Vector2d & a, const Eigen::Vector2d & b) {
    const double len = (b - o).norm();
    return detail::cross2(o, a, b) > turn_tol * std::max(len, 1e-300);
  };

  std::vector<Eigen::Vector2d> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && !keeps_left_turn(h[k - 2], h[k - 1], p[i])) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && !keeps_left_turn(h[k - 2], h[k - 1], p[i])) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  if (h.size() == 1 || (h.size() == 2 && (h[0] - h[1]).norm() <= tau)) h.resize(1);

  Matrix m(2, static_cast<Eigen::Index>(h.size()));
  for (std::size_t c = 0; c < h.size(); ++c) m.col(static_cast<Eigen::Index>(c)) = h[c];
  return Polytope(VertexCloud(std::move(m)), true);
}

inline Polytope Polytope::from_cloud(const VertexCloud & cloud)
{
  if (cloud.dim() == 2) return convex_hull_2d(cloud);
  if (cloud.dim() == 1) {
    Eigen::Index lo = 0;
    Eigen::Index hi = 0;
    for (Eigen::Index i = 1; i < cloud.size(); ++i) {
      if (cloud.point(i)(0) < cloud.point(lo)(0)) lo = i;
      if (cloud.point(i)(0) > cloud.point(hi)(0)) hi = i;
    }
    const double tau = tol::hull(cloud.bbox_diameter());
    if (cloud.point(hi)(0) - cloud.point(lo)(0) <= tau) return Polytope(cloud.subset({lo}), true);
    return Polytope(cloud.subset({lo, hi}), true);
  }
  const double tau = tol::hull(cloud.bbox_diameter());
  return Polytope(cloud.subset(detail::dedup_indices(cloud, tau)), cloud.size() == 1);
}

/// Euclidean distance from p to conv(poly) as the norm of the min-norm point of {v - p}.
inline double dist_point_to_hull(const Vector & p, const Polytope & poly)
{
  if (p.size() != poly.dim()) throw InvalidArgument("dist_point_to_hull: dimension mismatch");
  return min_norm_point(poly.vertices().translated(-p)).norm;
}

inline Polytope Polytope::pruned() const
{
  if (extreme_only_ || size() <= 1) return *this;
  const double tau = tol::hull(verts_.bbox_diameter());
  std::vector<Eigen::Index> keep;
  std::vector<bool> alive(static_cast<std::size_t>(size()), true);
  for (Eigen::Index i = 0; i < size(); ++i) {
    std::vector<Eigen::Index> others;
    for (Eigen::Index j = 0; j < size(); ++j) {
      if (j != i && alive[static_cast<std::size_t>(j)]) others.push_back(j);
    }
    if (others.empty()) continue;
    const Polytope rest(verts_.subset(others), false);
    if (dist_point_to_hull(verts_.point(i), rest) <= tau) alive[static_cast<std::size_t>(i)] = false;
  }
  for (Eigen::Index i = 0; i < size(); ++i) {
    if (alive[static_cast<std::size_t>(i)]) keep.push_back(i);
  }
  return Polytope(verts_.subset(keep), true);
}

/// h(cloud, u) = max over points of <p, u>.
inline double support(const VertexCloud & cloud, const Direction & u)
{
  if (cloud.dim() != u.dim()) throw InvalidArgument("support: dimension mismatch");
  return (u.vector().transpose() * cloud.matrix()).maxCoeff();
}

/**
 * @brief Convex polygon with logarithmic point-distance queries.
 *
 * Vertices must be counter-clockwise extreme points (as produced by
 * convex_hull_2d) with at least three entries.
 */
class ConvexPolygon
{
public:
  explicit ConvexPolygon(const Polytope & poly)
  {
    if (poly.dim() != 2 || poly.size() < 3) {
      throw InvalidArgument("ConvexPolygon: needs a planar polytope with >= 3 vertices");
    }
    const Matrix & m = poly.vertices().matrix();
    center_ = m.rowwise().mean();
    const auto n = static_cast<std::size_t>(m.cols());
    std::vector<double> raw(n);
    std::size_t start = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector2d d = m.col(static_cast<Eigen::Index>(i)) - center_;
      raw[i] = std::atan2(d.y(), d.x());
      if (raw[i] < raw[start]) start = i;
    }
    v_.reserve(n);
    ang_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (start + k) % n;
      v_.emplace_back(m.col(static_cast<Eigen::Index>(i)));
      ang_.push_back(raw[i]);
    }
  }

  std::size_t size() const { return v_.size(); }

  /// Distance from y to the polygon (0 inside).
  double distance(const Eigen::Vector2d & y) const
  {
    const std::size_t n = v_.size();
    const Eigen::Vector2d d = y - center_;
    const double th = std::atan2(d.y(), d.x());
    auto it = std::upper_bound(ang_.begin(), ang_.end(), th);
    std::size_t j = it == ang_.begin() ? n - 1 : static_cast<std::size_t>(it - ang_.begin()) - 1;
    const auto edge = [&](std::size_t e) {
      return detail::segment_distance(v_[e % n], v_[(e + 1) % n], y);
    };
    if (detail::cross2(v_[j], v_[(j + 1) % n], y) >= 0.0) return 0.0;
    double best = edge(j);
    for (std::size_t s = 1; s < n; ++s) {
      const double dd = edge(j + s);
      if (dd >= best) break;
      best = dd;
    }
    for (std::size_t s = 1; s < n; ++s) {
      const double dd = edge(j + n - s);
      if (dd >= best) break;
      best = dd;
    }
    return best;
  }

private:
  Eigen::Vector2d center_;
  std::vector<Eigen::Vector2d> v_;
  std::vector<double> ang_;
};

/// conv(inner) is not contained in conv(outer): names the offending vertex.
class NestingViolation : public InvalidArgument
{
public:
  NestingViolation(Eigen::Index vertex, double excess)
      : InvalidArgument(
          "hausdorff_nested: inner vertex " + std::to_string(vertex) + " lies outside the outer hull by " +
          std::to_string(excess)),
        vertex_(vertex),
        excess_(excess)
  {}

  Eigen::Index vertex() const { return vertex_; }
  double excess() const { return excess_; }

private:
  Eigen::Index vertex_;
  double excess_;
};

/**
 * @brief Hausdorff distance between conv(outer) and conv(inner) for nested hulls.
 *
 * Because distance to a convex set is convex, the supremum over conv(outer)
 * is attained at a point of the outer cloud, so the result is
 * max_p dist(p, conv(inner)). Nesting is checked first: every inner vertex
 * must be within `nesting_tol` of conv(outer) (default tau_hull).
 *
 * Planar inputs with non-degenerate hulls use ConvexPolygon queries, every
 * other case uses min-norm-point projections.
 */
inline double hausdorff_nested(const VertexCloud & outer, const Polytope & inner, double nesting_tol = -1.0)
{
  if (outer.dim() != inner.dim()) throw InvalidArgument("hausdorff_nested: dimension mismatch");
  if (nesting_tol < 0.0) {
    nesting_tol = tol::hull(std::max(outer.bbox_diameter(), inner.vertices().bbox_diameter()));
  }
  const auto & iv = inner.vertices();

  if (outer.dim() == 2) {
    const Polytope outer_hull = convex_hull_2d(outer);
    if (outer_hull.size() >= 3) {
      const ConvexPolygon og(outer_hull);
      for (Eigen::Index i = 0; i < iv.size(); ++i) {
        const double ex = og.distance(iv.point(i));
        if (ex > nesting_tol) throw NestingViolation(i, ex);
      }
    } else {
      for (Eigen::Index i = 0; i < iv.size(); ++i) {
        const double ex = dist_point_to_hull(iv.point(i), outer_hull);
        if (ex > nesting_tol) throw NestingViolation(i, ex);
      }
    }
    double dh = 0.0;
    if (inner.size() >= 3) {
      const ConvexPolygon ig(inner);
      for (Eigen::Index i = 0; i < outer_hull.size(); ++i) {
        dh = std::max(dh, ig.distance(outer_hull.vertices().point(i)));
      }
    } else {
      for (Eigen::Index i = 0; i < outer_hull.size(); ++i) {
        dh = std::max(dh, dist_point_to_hull(outer_hull.vertices().point(i), inner));
      }
    }
    return dh;
  }

  const Polytope outer_poly = Polytope::from_cloud(outer);
  for (Eigen::Index i = 0; i < iv.size(); ++i) {
    const double ex = dist_point_to_hull(iv.point(i), outer_poly);
    if (ex > nesting_tol) throw NestingViolation(i, ex);
  }
  double dh = 0.0;
  for (Eigen::Index i = 0; i < outer.size(); ++i) dh = std::max(dh, dist_point_to_hull(outer.point(i), inner));
  return dh;
}

// ---------------------------------------------------------------------------
// Serialization

inline void write_csv(std::ostream & os, const VertexCloud & cloud)
{
  os << std::setprecision(17);
  for (Eigen::Index r = 0; r < cloud.dim(); ++r) os << (r ? "," : "") << 'x' << (r + 1);
  os << '\n';
  for (Eigen::Index c = 0; c < cloud.size(); ++c) {
    for (Eigen::Index r = 0; r < cloud.dim(); ++r) os << (r ? "," : "") << cloud.matrix()(r, c);
    os << '\n';
  }
}

inline void write_csv(std::ostream & os, const Polytope & poly) { write_csv(os, poly.vertices()); }

/// Reads the x1..xd CSV written by write_csv.
inline VertexCloud read_cloud_csv(std::istream & is)
{
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("read_cloud_csv: missing header");
  const auto d = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',') + 1);
  std::vector<Vector> pts;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    Vector p(d);
    std::string cell;
    for (Eigen::Index r = 0; r < d; ++r) {
      if (!std::getline(ss, cell, ',')) throw InvalidArgument("read_cloud_csv: short row");
      p(r) = std::stod(cell);
    }
    pts.push_back(std::move(p));
  }
  return VertexCloud(pts);
}

inline nlohmann::json to_json(const Polytope & poly)
{
  nlohmann::json j;
  j["dim"] = poly.dim();
  auto & arr = j["vertices"] = nlohmann::json::array();
  for (Eigen::Index c = 0; c < poly.size(); ++c) {
    auto row = nlohmann::json::array();
    for (Eigen::Index r = 0; r < poly.dim(); ++r) row.push_back(poly.vertices().matrix()(r, c));
    arr.push_back(std::move(row));
  }
  return j;
}

inline Polytope polytope_from_json(const nlohmann::json & j)
{
  const auto d = j.at("dim").get<Eigen::Index>();
  std::vector<Vector> pts;
  for (const auto & row : j.at("vertices")) {
    if (static_cast<Eigen::Index>(row.size()) != d) throw InvalidArgument("polytope_from_json: bad vertex");
    Vector p(d);
    for (Eigen::Index r = 0; r < d; ++r) p(r) = row.at(static_cast<std::size_t>(r)).get<double>();
    pts.push_back(std::move(p));
  }
  return Polytope::from_cloud(VertexCloud(pts));
}

}  // namespace hullcert

#endif  // HULLCERT_GEOMETRY_HPP_
