#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "adate/env.hpp"
#include "adate/qtable.hpp"

namespace adate {

struct DpOptions {
  double tol = 1e-12;     // stationary mode: stop when no entry moves more
  int max_sweeps = 20000;  // stationary mode: hard cap
};

struct DpStats {
  int sweeps = 0;
  double last_delta = 0.0;
  bool converged = true;
};

// Exact values of the snapped chain under the env's subject model, with the
// successor action always drawn from phi. horizon >= 0 runs exactly that many
// backward sweeps, so Q(s,a) = P(crash within `horizon` steps | s,a) at
// gamma = 1; horizon = -1 iterates the same sweep to its fixed point, the
// stationary (unbounded-time) values.
inline QTable backward_induction_q(const GridChainEnv& env, double gamma,
                                   int horizon, const DpOptions& opt = {},
                                   DpStats* stats = nullptr) {
  const GridSpec& g = env.grid;
  if (horizon < -1) throw std::invalid_argument("dp: bad horizon");
  QTable q = QTable::zeros(g, gamma, horizon);
  const CellIndex nc = g.cell_count();
  const int na = g.n_actions();
  const CellIndex crash = g.crash_index();
  std::vector<double> v(static_cast<std::size_t>(g.state_count()), 0.0);

  const int limit = horizon >= 0 ? horizon : opt.max_sweeps;
  int sweeps = 0;
  double delta = 0.0;
  for (; sweeps < limit; ++sweeps) {
    for (CellIndex s = 0; s < nc; ++s) {
      const double* qs = q.row(s);
      const double* ps = env.phi_row(s);
      double acc = 0.0;
      for (int a = 0; a < na; ++a) acc += qs[a] * ps[a];
      v[static_cast<std::size_t>(s)] = acc;
    }
    delta = 0.0;
    for (CellIndex s = 0; s < nc; ++s) {
      for (int a = 0; a < na; ++a) {
        const CellIndex nxt = env.successor(s, a);
        const double target =
            (nxt == crash ? 1.0 : 0.0) + gamma * v[static_cast<std::size_t>(nxt)];
        double& cur = q.at(s, a);
        const double d = std::abs(target - cur);
        if (d > delta) delta = d;
        cur = target;
      }
    }
    if (horizon < 0 && delta <= opt.tol) {
      ++sweeps;
      break;
    }
  }
  if (stats) {
    stats->sweeps = sweeps;
    stats->last_delta = delta;
    stats->converged = horizon >= 0 || delta <= opt.tol;
  }
  return q;
}

// Per-state phi-weighted value V(s) = sum_a Q(s,a) phi(a|s); terminal rows 0.
struct ValueTable {
  std::uint64_t grid_hash = 0;
  std::vector<double> v;

  double at(CellIndex s) const { return v[static_cast<std::size_t>(s)]; }
};

template <class Env>
ValueTable criticality(const QTable& q, const Env& env) {
  const GridSpec& g = env.grid;
  if (q.grid_hash != g.hash()) {
    throw std::invalid_argument("criticality: table grid does not match env");
  }
  ValueTable out;
  out.grid_hash = q.grid_hash;
  out.v.assign(static_cast<std::size_t>(g.state_count()), 0.0);
  const int na = g.n_actions();
  for (CellIndex s = 0; s < g.cell_count(); ++s) {
    const double* qs = q.row(s);
    const double* ps = env.phi_row(s);
    double acc = 0.0;
    for (int a = 0; a < na; ++a) acc += qs[a] * ps[a];
    out.v[static_cast<std::size_t>(s)] = acc;
  }
  return out;
}

// Entry-wise unweighted mean of J tables.
inline QTable mean_q(const std::vector<const QTable*>& qs) {
  if (qs.empty()) throw std::invalid_argument("mean_q: empty table list");
  QTable out = *qs[0];
  for (std::size_t j = 1; j < qs.size(); ++j) {
    const QTable& t = *qs[j];
    if (t.values.size() != out.values.size() || t.grid_hash != out.grid_hash) {
      throw std::invalid_argument("mean_q: mismatched tables");
    }
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += t.values[i];
    }
  }
  const double inv = 1.0 / static_cast<double>(qs.size());
  for (double& x : out.values) x *= inv;
  return out;
}

// Critical set: states whose mean-surrogate criticality is strictly positive.
struct CriticalSet {
  std::vector<std::uint8_t> member;  // indexed by state, terminals excluded
  std::vector<CellIndex> cells;      // ascending list of member cells
  std::vector<double> v_bar;         // mean criticality per state

  bool contains(CellIndex s) const {
    return member[static_cast<std::size_t>(s)] != 0;
  }
};

template <class Env>
CriticalSet critical_set(const std::vector<const QTable*>& qs, const Env& env) {
  const QTable qbar = mean_q(qs);
  const ValueTable vbar = criticality(qbar, env);
  CriticalSet out;
  out.v_bar = vbar.v;
  out.member.assign(vbar.v.size(), 0);
  for (CellIndex s = 0; s < env.cell_count(); ++s) {
    if (vbar.at(s) > 0.0) {
      out.member[static_cast<std::size_t>(s)] = 1;
      out.cells.push_back(s);
    }
  }
  return out;
}

// psi(a|s) = Q(s,a) phi(a|s) / V(s); falls back to phi where V(s) = 0 so the
// policy is defined everywhere.
template <class Env>
ActionDistribution importance_policy(const QTable& q, const Env& env,
                                     CellIndex s) {
  const int na = env.n_actions();
  const double* qs = q.row(s);
  const double* ps = env.phi_row(s);
  double v = 0.0;
  for (int a = 0; a < na; ++a) v += qs[a] * ps[a];
  ActionDistribution psi(static_cast<std::size_t>(na));
  if (v > 0.0) {
    for (int a = 0; a < na; ++a) psi[a] = qs[a] * ps[a] / v;
  } else {
    for (int a = 0; a < na; ++a) psi[a] = ps[a];
  }
  return psi;
}

inline ActionDistribution mixture_policy(
    const std::vector<double>& alpha,
    const std::vector<ActionDistribution>& psis) {
  if (alpha.size() != psis.size() || alpha.empty()) {
    throw std::invalid_argument("mixture_policy: dimension mismatch");
  }
  const std::size_t na = psis[0].size();
  ActionDistribution out(na, 0.0);
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (psis[j].size() != na) {
      throw std::invalid_argument("mixture_policy: dimension mismatch");
    }
    for (std::size_t a = 0; a < na; ++a) out[a] += alpha[j] * psis[j][a];
  }
  return out;
}

// States the surrogate set misses: oracle says reachable crash (V* > 0) but
// the mean surrogate criticality is zero. Nonzero count means the surrogate
// set lacks the diversity the estimators rely on.
inline std::vector<CellIndex> coverage_violations(const ValueTable& oracle_v,
                                                  const CriticalSet& sc) {
  std::vector<CellIndex> bad;
  const CellIndex n = static_cast<CellIndex>(sc.v_bar.size()) - 2;
  for (CellIndex s = 0; s < n; ++s) {
    if (oracle_v.at(s) > 0.0 && !sc.contains(s)) bad.push_back(s);
  }
  return bad;
}

}  // namespace adate
