#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "adate/env.hpp"
#include "adate/simplex_lsq.hpp"

namespace adate::testsupport {

// Finite-horizon crash values by raw tree enumeration, no memoization: an
// independent check on the dynamic-programming sweep. Exponential in the
// horizon; keep h small.
inline double tree_v(const GridChainEnv& env, CellIndex s, int h, double gamma);

inline double tree_q(const GridChainEnv& env, CellIndex s, int a, int h,
                     double gamma) {
  const CellIndex next = env.successor(s, a);
  const double r = next == env.crash_index() ? 1.0 : 0.0;
  return r + gamma * tree_v(env, next, h - 1, gamma);
}

inline double tree_v(const GridChainEnv& env, CellIndex s, int h, double gamma) {
  if (h <= 0 || env.is_terminal(s)) return 0.0;
  const double* phi = env.phi_row(s);
  double v = 0.0;
  for (int a = 0; a < env.n_actions(); ++a) {
    v += phi[a] * tree_q(env, s, a, h, gamma);
  }
  return v;
}

// Minimum of the least-squares objective over a barycentric lattice with
// `steps` subdivisions per edge; brute-force reference for the exact solver.
inline void lattice_rec(const RegressionSystem& sys, std::vector<int>& part,
                        std::size_t j, int left, int steps, double& best) {
  const std::size_t jn = part.size();
  if (j + 1 == jn) {
    part[j] = left;
    std::vector<double> alpha(jn);
    for (std::size_t i = 0; i < jn; ++i) {
      alpha[i] = static_cast<double>(part[i]) / steps;
    }
    const double obj = lsq_objective(sys, alpha);
    if (obj < best) best = obj;
    return;
  }
  for (int i = 0; i <= left; ++i) {
    part[j] = i;
    lattice_rec(sys, part, j + 1, left - i, steps, best);
  }
}

inline double lattice_min_objective(const RegressionSystem& sys, int steps) {
  std::vector<int> part(static_cast<std::size_t>(sys.m.cols()));
  double best = std::numeric_limits<double>::infinity();
  lattice_rec(sys, part, 0, steps, steps, best);
  return best;
}

// Probability, under the naturalistic action weights, of crashing within h
// steps while every action taken at a controlled state stays inside the
// sampling policy's support. Controlled states keep their unrenormalized phi
// weights restricted to supported actions; everything else sums over all
// actions. This is the exact expectation of the importance-weighted crash
// indicator when the sampling policy has zero defensive mass.
inline double restricted_tree_v(
    const GridChainEnv& env, CellIndex s, int h,
    const std::function<bool(CellIndex)>& controlled,
    const std::function<bool(CellIndex, int)>& supported) {
  if (h <= 0 || env.is_terminal(s)) return 0.0;
  const double* phi = env.phi_row(s);
  const bool ctl = controlled(s);
  double v = 0.0;
  for (int a = 0; a < env.n_actions(); ++a) {
    if (ctl && !supported(s, a)) continue;
    const CellIndex next = env.successor(s, a);
    const double r = next == env.crash_index() ? 1.0 : 0.0;
    v += phi[a] * (r + restricted_tree_v(env, next, h - 1, controlled, supported));
  }
  return v;
}

// Same quantity by value iteration over the whole state space; linear in
// h * states * actions, usable on full-size grids.
inline std::vector<double> restricted_dp_values(
    const GridChainEnv& env, const std::function<bool(CellIndex)>& controlled,
    const std::function<bool(CellIndex, int)>& supported, int h) {
  const std::size_t ns = static_cast<std::size_t>(env.grid.state_count());
  std::vector<double> v(ns, 0.0), next_v(ns, 0.0);
  for (int t = 0; t < h; ++t) {
    for (CellIndex s = 0; s < env.cell_count(); ++s) {
      const double* phi = env.phi_row(s);
      const bool ctl = controlled(s);
      double acc = 0.0;
      for (int a = 0; a < env.n_actions(); ++a) {
        if (ctl && !supported(s, a)) continue;
        const CellIndex nx = env.successor(s, a);
        const double r = nx == env.crash_index() ? 1.0 : 0.0;
        acc += phi[a] * (r + v[static_cast<std::size_t>(nx)]);
      }
      next_v[static_cast<std::size_t>(s)] = acc;
    }
    std::swap(v, next_v);
  }
  return v;
}

}  // namespace adate::testsupport
