#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace adate {

// Combination coefficients on the probability simplex.
struct MixtureWeights {
  std::vector<double> alpha;

  std::size_t size() const { return alpha.size(); }

  void validate() const {
    if (alpha.empty()) throw std::invalid_argument("mixture weights: empty");
    double sum = 0.0;
    for (double a : alpha) {
      if (!(a >= 0.0)) {
        throw std::invalid_argument("mixture weights: negative entry");
      }
      sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("mixture weights: sum differs from 1");
    }
  }
};

// Explicit design matrix M (one row per visited critical pair, one column per
// surrogate) and target vector y of learned values.
struct RegressionSystem {
  Eigen::MatrixXd m;
  Eigen::VectorXd y;
};

inline double lsq_objective(const RegressionSystem& sys,
                            const std::vector<double>& alpha) {
  Eigen::Map<const Eigen::VectorXd> a(alpha.data(),
                                      static_cast<Eigen::Index>(alpha.size()));
  return 0.5 * (sys.m * a - sys.y).squaredNorm();
}

namespace detail {

// Minimizer of 0.5 a^T G a - b^T a over {sum_F a = 1, a_j = 0 off F},
// unrestricted in sign on F. Parametrized as a_F = 1/f + Z beta with Z the
// difference basis, solved by a rank-revealing decomposition so duplicate
// surrogate columns cannot crash the solve.
inline Eigen::VectorXd face_minimizer(const Eigen::MatrixXd& g,
                                      const Eigen::VectorXd& b,
                                      const std::vector<int>& free) {
  const int f = static_cast<int>(free.size());
  Eigen::VectorXd a = Eigen::VectorXd::Zero(g.rows());
  if (f == 1) {
    a[free[0]] = 1.0;
    return a;
  }
  Eigen::MatrixXd gff(f, f);
  Eigen::VectorXd bf(f);
  for (int i = 0; i < f; ++i) {
    bf[i] = b[free[i]];
    for (int j = 0; j < f; ++j) gff(i, j) = g(free[i], free[j]);
  }
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(f, f - 1);
  for (int i = 0; i < f - 1; ++i) {
    z(i, i) = 1.0;
    z(i + 1, i) = -1.0;
  }
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(f, 1.0 / f);
  const Eigen::MatrixXd h = z.transpose() * gff * z;
  const Eigen::VectorXd rhs = z.transpose() * (bf - gff * u);
  const Eigen::VectorXd beta =
      h.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd af = u + z * beta;
  for (int i = 0; i < f; ++i) a[free[i]] = af[i];
  return a;
}

}  // namespace detail

// Global minimizer of 0.5 a^T G a - b^T a over the simplex, where G = M^T M
// and b = M^T y. Every face of the simplex is enumerated (J <= 16 guards the
// 2^J cost); any extreme global minimizer has a face whose equality-
// constrained solve reproduces it exactly, so picking the feasible candidate
// with the lowest objective is globally correct.
inline MixtureWeights solve_simplex_lsq_normal(const Eigen::MatrixXd& g,
                                               const Eigen::VectorXd& b) {
  const int j = static_cast<int>(g.rows());
  if (j < 1) throw std::invalid_argument("simplex lsq: J must be >= 1");
  if (j > 16) throw std::invalid_argument("simplex lsq: J too large");
  constexpr double kFeasTol = 1e-11;
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best;
  for (unsigned mask = 1; mask < (1u << j); ++mask) {
    std::vector<int> free;
    for (int i = 0; i < j; ++i) {
      if (mask & (1u << i)) free.push_back(i);
    }
    const Eigen::VectorXd a = detail::face_minimizer(g, b, free);
    bool feasible = true;
    for (int i = 0; i < j; ++i) {
      if (a[i] < -kFeasTol) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const double obj = 0.5 * a.dot(g * a) - b.dot(a);
    if (obj < best_obj) {
      best_obj = obj;
      best = a;
    }
  }
  MixtureWeights w;
  w.alpha.resize(static_cast<std::size_t>(j));
  double sum = 0.0;
  for (int i = 0; i < j; ++i) {
    w.alpha[static_cast<std::size_t>(i)] = std::max(best[i], 0.0);
    sum += w.alpha[static_cast<std::size_t>(i)];
  }
  for (double& x : w.alpha) x /= sum;
  return w;
}

// Explicit-matrix entry point. Rows are accumulated into normal equations in
// a canonical sorted order, so row-permuted systems return bit-identical
// coefficients.
inline MixtureWeights solve_simplex_lsq(const RegressionSystem& sys) {
  const Eigen::Index rows = sys.m.rows();
  const Eigen::Index j = sys.m.cols();
  if (j < 1 || rows < 1 || sys.y.size() != rows) {
    throw std::invalid_argument("simplex lsq: empty or mismatched system");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < j; ++c) {
      if (sys.m(a, c) != sys.m(b, c)) return sys.m(a, c) < sys.m(b, c);
    }
    return sys.y[a] < sys.y[b];
  });
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(j, j);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(j);
  for (Eigen::Index i : order) {
    const Eigen::VectorXd row = sys.m.row(i).transpose();
    g.noalias() += row * row.transpose();
    b.noalias() += sys.y[i] * row;
  }
  return solve_simplex_lsq_normal(g, b);
}

// KKT stationarity certificate from (M, y, alpha) alone: on the support the
// gradient matches the shared multiplier; off it the gradient may only exceed
// the multiplier.
inline bool kkt_certificate(const RegressionSystem& sys,
                            const std::vector<double>& alpha, double tol = 1e-8,
                            double* worst = nullptr) {
  Eigen::Map<const Eigen::VectorXd> a(alpha.data(),
                                      static_cast<Eigen::Index>(alpha.size()));
  const Eigen::VectorXd grad = sys.m.transpose() * (sys.m * a - sys.y);
  double lambda = 0.0;
  int n_free = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) {
      lambda += grad[i];
      ++n_free;
    }
  }
  if (n_free == 0) return false;
  lambda /= n_free;
  double bad = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] > 0.0) {
      bad = std::max(bad, std::abs(grad[i] - lambda));
    } else {
      bad = std::max(bad, std::max(0.0, lambda - grad[i]));
    }
  }
  if (worst) *worst = bad;
  return bad <= tol;
}

// Incrementally maintained normal equations over the visited critical pairs.
// A pair enters once (first visit) with its current target; later value
// updates shift the target through bump_y, so the system always reflects the
// learner's present table without rescanning it.
struct RegressionAccum {
  Eigen::MatrixXd g;
  Eigen::VectorXd b;
  std::size_t rows = 0;

  explicit RegressionAccum(int j)
      : g(Eigen::MatrixXd::Zero(j, j)), b(Eigen::VectorXd::Zero(j)) {}

  void add_pair(const double* m, double y) {
    const Eigen::Index j = g.rows();
    Eigen::Map<const Eigen::VectorXd> row(m, j);
    g.noalias() += row * row.transpose();
    b.noalias() += y * row;
    ++rows;
  }
  void bump_y(const double* m, double dy) {
    Eigen::Map<const Eigen::VectorXd> row(m, g.rows());
    b.noalias() += dy * row;
  }
  MixtureWeights solve() const {
    if (rows == 0) throw std::invalid_argument("simplex lsq: empty system");
    return solve_simplex_lsq_normal(g, b);
  }
};

}  // namespace adate
