#ifndef HULLCERT_QP_HPP_
#define HULLCERT_QP_HPP_

/**
 * @file
 * @brief Convex quadratic programs
 *
 *     minimize 1/2 x'Px + q'x  subject to  l <= Ax <= u
 *
 * solved by operator splitting (ADMM) with a cached dense LDL' factorization
 * of the reduced KKT matrix, Ruiz equilibration and primal infeasibility
 * detection.
 */

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>

#include "hullcert/core.hpp"

namespace hullcert {

struct QuadProg
{
  Matrix P;  ///< n x n, symmetric positive semidefinite
  Vector q;
  Matrix A;  ///< m x n
  Vector l;  ///< may hold -inf
  Vector u;  ///< may hold +inf

  Eigen::Index n() const { return P.rows(); }
  Eigen::Index m() const { return A.rows(); }

  void validate() const
  {
    const auto nn = P.rows();
    if (P.cols() != nn || q.size() != nn || A.cols() != nn || l.size() != A.rows() || u.size() != A.rows()) {
      throw InvalidArgument("QuadProg: inconsistent dimensions");
    }
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff())) {
      throw InvalidArgument("QuadProg: P is not symmetric");
    }
    for (Eigen::Index i = 0; i < l.size(); ++i) {
      if (l(i) > u(i)) throw InvalidArgument("QuadProg: l > u in row " + std::to_string(i));
    }
  }

  double objective(const Vector & x) const { return 0.5 * x.dot(P * x) + q.dot(x); }
};

struct QpSettings
{
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  double eps_prim_inf = 1e-5;
  int max_iter = 20000;
  int scaling_iters = 10;
  int check_every = 5;
};

enum class QpStatus { solved, max_iter, primal_infeasible_suspected };

inline const char * to_string(QpStatus s)
{
  switch (s) {
    case QpStatus::solved: return "solved";
    case QpStatus::max_iter: return "max_iter";
    case QpStatus::primal_infeasible_suspected: return "primal_infeasible_suspected";
  }
  return "?";
}

struct QpSolution
{
  Vector x;
  Vector y;
  QpStatus status = QpStatus::max_iter;
  double primal_res = kInf;
  double dual_res = kInf;
  int iterations = 0;
  double objective = kInf;
};

namespace detail {

inline double inf_norm(const Vector & v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline double clamp_scale(double norm)
{
  if (norm < 1e-4) return 1.0;
  return 1.0 / std::sqrt(std::min(norm, 1e4));
}

}  // namespace detail

/**
 * @brief ADMM with fixed rho (1e3 rho on equality rows), sigma and
 * over-relaxation alpha.
 *
 * Residuals are measured on the unscaled problem. The iteration is
 * deterministic: identical inputs yield bitwise-identical iterates.
 */
inline QpSolution solve(const QuadProg & prob, const QpSettings & st = {})
{
  prob.validate();
  const Eigen::Index n = prob.n();
  const Eigen::Index m = prob.m();

  // Ruiz equilibration of [P A'; A 0] plus cost scaling.
  Matrix Ps = prob.P;
  Matrix As = prob.A;
  Vector qs = prob.q;
  Vector D = Vector::Ones(n);
  Vector E = Vector::Ones(m);
  double c = 1.0;
  for (int it = 0; it < st.scaling_iters; ++it) {
    Vector dt(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double cn = Ps.col(j).cwiseAbs().maxCoeff();
      if (m > 0) cn = std::max(cn, As.col(j).cwiseAbs().maxCoeff());
      dt(j) = detail::clamp_scale(cn);
    }
    Vector et(m);
    for (Eigen::Index i = 0; i < m; ++i) et(i) = detail::clamp_scale(As.row(i).cwiseAbs().maxCoeff());
    Ps = dt.asDiagonal() * Ps * dt.asDiagonal();
    As = et.asDiagonal() * As * dt.asDiagonal();
    qs = dt.cwiseProduct(qs);
    D = D.cwiseProduct(dt);
    E = E.cwiseProduct(et);
    double mean_col = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) mean_col += Ps.col(j).cwiseAbs().maxCoeff();
    mean_col /= static_cast<double>(std::max<Eigen::Index>(n, 1));
    const double cs = std::max(mean_col, detail::inf_norm(qs));
    const double ct = cs < 1e-4 ? 1.0 : 1.0 / std::min(cs, 1e4);
    Ps *= ct;
    qs *= ct;
    c *= ct;
  }
  Vector ls = E.cwiseProduct(prob.l);
  Vector us = E.cwiseProduct(prob.u);

  Vector rho(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const bool lo_inf = std::isinf(prob.l(i));
    const bool up_inf = std::isinf(prob.u(i));
    if (lo_inf && up_inf) {
      rho(i) = 1e-6;
    } else if (prob.u(i) - prob.l(i) < 1e-4 * std::max(1.0, std::abs(prob.u(i)))) {
      rho(i) = 1e3 * st.rho;
    } else {
      rho(i) = st.rho;
    }
  }

  Matrix K = Ps;
  K.diagonal().array() += st.sigma;
  K.noalias() += As.transpose() * rho.asDiagonal() * As;
  const Eigen::LDLT<Matrix> ldlt(K);
  if (ldlt.info() != Eigen::Success) throw NumericalError("qp::solve: KKT factorization failed");

  Vector x = Vector::Zero(n);
  Vector z = Vector::Zero(m);
  Vector y = Vector::Zero(m);
  Vector y_prev = y;

  QpSolution sol;

  auto unscaled = [&](QpSolution & s) {
    s.x = D.cwiseProduct(x);
    s.y = E.cwiseProduct(y) / c;
    const Vector zu = z.cwiseQuotient(E);
    const Vector Ax = prob.A * s.x;
    const Vector Px = prob.P * s.x;
    const Vector Aty = prob.A.transpose() * s.y;
    s.primal_res = m ? detail::inf_norm(Ax - zu) : 0.0;
    s.dual_res = detail::inf_norm(Px + prob.q + Aty);
    s.objective = prob.objective(s.x);
    const double eps_p = st.eps_abs + st.eps_rel * std::max(detail::inf_norm(Ax), detail::inf_norm(zu));
    const double eps_d =
      st.eps_abs + st.eps_rel * std::max({detail::inf_norm(Px), detail::inf_norm(Aty), detail::inf_norm(prob.q)});
    return s.primal_res <= eps_p && s.dual_res <= eps_d;
  };

  auto primal_infeasible = [&]() {
    if (m == 0) return false;
    const Vector dy = E.cwiseProduct(y - y_prev);
    const double ndy = detail::inf_norm(dy);
    if (ndy < 1e-12) return false;
    if (detail::inf_norm(prob.A.transpose() * dy) > st.eps_prim_inf * ndy) return false;
    double support = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (dy(i) > st.eps_prim_inf * ndy) {
        if (std::isinf(prob.u(i))) return false;
        support += prob.u(i) * dy(i);
      } else if (dy(i) < -st.eps_prim_inf * ndy) {
        if (std::isinf(prob.l(i))) return false;
        support += prob.l(i) * dy(i);
      }
    }
    return support < -st.eps_prim_inf * ndy;
  };

  for (int k = 1; k <= st.max_iter; ++k) {
    y_prev = y;
    const Vector rhs = st.sigma * x - qs + As.transpose() * (rho.cwiseProduct(z) - y);
    const Vector xt = ldlt.solve(rhs);
    const Vector zt = As * xt;
    x = st.alpha * xt + (1.0 - st.alpha) * x;
    const Vector zr = st.alpha * zt + (1.0 - st.alpha) * z;
    z = (zr + y.cwiseQuotient(rho)).cwiseMax(ls).cwiseMin(us);
    y += rho.cwiseProduct(zr - z);

    if (k % st.check_every == 0 || k == st.max_iter) {
      sol.iterations = k;
      if (unscaled(sol)) {
        sol.status = QpStatus::solved;
        return sol;
      }
      if (primal_infeasible()) {
        sol.status = QpStatus::primal_infeasible_suspected;
        return sol;
      }
    }
  }
  sol.status = QpStatus::max_iter;
  return sol;
}

// ---------------------------------------------------------------------------
// Sparse-triplet CSV: header "matrix,row,col,value", a "dims" row (n, m), then
// nonzeros of P and A plus every entry of q, l, u (column 0).

inline void write_triplets(std::ostream & os, const QuadProg & qp)
{
  os << std::setprecision(17) << "matrix,row,col,value\n";
  os << "dims," << qp.n() << ',' << qp.m() << ",0\n";
  for (Eigen::Index i = 0; i < qp.P.rows(); ++i) {
    for (Eigen::Index j = 0; j < qp.P.cols(); ++j) {
      if (qp.P(i, j) != 0.0) os << "P," << i << ',' << j << ',' << qp.P(i, j) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < qp.q.size(); ++i) os << "q," << i << ",0," << qp.q(i) << '\n';
  for (Eigen::Index i = 0; i < qp.A.rows(); ++i) {
    for (Eigen::Index j = 0; j < qp.A.cols(); ++j) {
      if (qp.A(i, j) != 0.0) os << "A," << i << ',' << j << ',' << qp.A(i, j) << '\n';
    }
  }
  for (Eigen::Index i = 0; i < qp.l.size(); ++i) os << "l," << i << ",0," << qp.l(i) << '\n';
  for (Eigen::Index i = 0; i < qp.u.size(); ++i) os << "u," << i << ",0," << qp.u(i) << '\n';
}

inline QuadProg read_triplets(std::istream & is)
{
  std::string line;
  std::getline(is, line);
  QuadProg qp;
  bool sized = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, rs, cs, vs;
    std::getline(ss, name, ',');
    std::getline(ss, rs, ',');
    std::getline(ss, cs, ',');
    std::getline(ss, vs, ',');
    const long r = std::stol(rs);
    const long c = std::stol(cs);
    if (name == "dims") {
      qp.P = Matrix::Zero(r, r);
      qp.q = Vector::Zero(r);
      qp.A = Matrix::Zero(c, r);
      qp.l = Vector::Zero(c);
      qp.u = Vector::Zero(c);
      sized = true;
      continue;
    }
    if (!sized) throw InvalidArgument("read_triplets: missing dims row");
    const double v = std::stod(vs);
    if (name == "P") qp.P(r, c) = v;
    else if (name == "q") qp.q(r) = v;
    else if (name == "A") qp.A(r, c) = v;
    else if (name == "l") qp.l(r) = v;
    else if (name == "u") qp.u(r) = v;
    else throw InvalidArgument("read_triplets: unknown matrix '" + name + "'");
  }
  if (!sized) throw InvalidArgument("read_triplets: missing dims row");
  return qp;
}

}  // namespace hullcert

#endif  // HULLCERT_QP_HPP_
