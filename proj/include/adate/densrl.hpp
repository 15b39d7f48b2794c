#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "adate/env.hpp"
#include "adate/qtable.hpp"
#include "adate/rng.hpp"
#include "adate/surrogate.hpp"

namespace adate {

// Relative surrogate-to-real deviation with the zero cases pinned: both zero
// means no gap, positive real value against a zero mixture is infinite.
inline double gap(double q_real, double q_mix) {
  if (q_real < 0.0 || q_mix < 0.0) {
    throw std::invalid_argument("gap: values must be nonnegative");
  }
  if (q_mix > 0.0) return std::abs(q_real - q_mix) / q_mix;
  if (q_real == 0.0) return 0.0;
  return std::numeric_limits<double>::infinity();
}

// Mixture value sum_j alpha_j Q_j(s,a) evaluated lazily; avoids materializing
// a J-fold blend every time alpha moves.
struct MixtureQ {
  const std::vector<const QTable*>* tables;
  const std::vector<double>* alpha;

  double at(CellIndex s, int a) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < tables->size(); ++j) {
      acc += (*alpha)[j] * (*tables)[j]->at(s, a);
    }
    return acc;
  }
};

struct Transition {
  CellIndex s = 0;
  int a = 0;
  double r = 0.0;  // 1 iff next is CRASH
  CellIndex next = 0;
};

struct LearnerState {
  QTable q;
  std::vector<std::uint32_t> n;       // visit counts, [s * n_actions + a]
  std::vector<std::uint64_t> n_state; // per-state count sums
  const CriticalSet* sc = nullptr;
  double c = 2.0;
  double omega = 0.85;
  double gamma = 1.0;
  std::uint64_t total_steps = 0;
  std::uint64_t episodes = 0;

  static LearnerState init(const GridSpec& g, const CriticalSet& sc, double c,
                           double omega, double gamma) {
    LearnerState L;
    L.q = QTable::zeros(g, gamma, -1);
    L.n.assign(L.q.values.size(), 0);
    L.n_state.assign(static_cast<std::size_t>(g.state_count()), 0);
    L.sc = &sc;
    L.c = c;
    L.omega = omega;
    L.gamma = gamma;
    return L;
  }

  std::uint32_t count(CellIndex s, int a) const {
    return n[static_cast<std::size_t>(s) * q.n_actions + a];
  }
  void bump_count(CellIndex s, int a) {
    ++n[static_cast<std::size_t>(s) * q.n_actions + a];
    ++n_state[static_cast<std::size_t>(s)];
    ++total_steps;
  }
};

// Exploration score U'(s,a) = gap + c * sqrt(sum_a' N(s,a')) / (1 + N(s,a)),
// ranked as U = U' * phi. Infinite gaps outrank every finite score; within
// the infinite tier only the bonus term can discriminate. Exact score ties
// are broken uniformly at random.
template <class QMix>
int adaptive_action(CellIndex s, const LearnerState& L, const QMix& q_mix,
                    const double* phi_row, Rng& rng) {
  const int na = L.q.n_actions;
  const double root_total =
      std::sqrt(static_cast<double>(L.n_state[static_cast<std::size_t>(s)]));
  double best_score = -1.0;
  bool best_inf = false;
  int n_best = 0;
  int pick = 0;
  for (int a = 0; a < na; ++a) {
    const double g = gap(L.q.at(s, a), q_mix.at(s, a));
    const double bonus = L.c * root_total / (1.0 + L.count(s, a));
    const bool inf = std::isinf(g);
    const double score = (inf ? bonus : g + bonus) * phi_row[a];
    if (n_best == 0 || inf > best_inf ||
        (inf == best_inf && score > best_score)) {
      best_inf = inf;
      best_score = score;
      n_best = 1;
      pick = a;
    } else if (inf == best_inf && score == best_score) {
      ++n_best;
      if (uniform_index(rng, static_cast<std::size_t>(n_best)) == 0) pick = a;
    }
  }
  return pick;
}

// One stochastic-approximation step toward the phi-expected Bellman target.
// The visit count must already include this visit (caller increments first);
// states outside the critical set are never written. Returns the applied
// increment nu * delta (0 when no update happened).
template <class Env>
double densrl_update(LearnerState& L, const Transition& tr, const Env& env) {
  if (!L.sc->contains(tr.s)) return 0.0;
  const std::uint32_t n = L.count(tr.s, tr.a);
  if (n == 0) {
    throw std::logic_error("densrl_update: count not incremented before update");
  }
  double bootstrap = 0.0;
  if (!env.is_terminal(tr.next)) {
    const double* qn = L.q.row(tr.next);
    const double* pn = env.phi_row(tr.next);
    for (int a = 0; a < L.q.n_actions; ++a) bootstrap += qn[a] * pn[a];
  }
  const double target = tr.r + L.gamma * bootstrap;
  const double nu = 1.0 / std::pow(static_cast<double>(n), L.omega);
  const double inc = nu * (target - L.q.at(tr.s, tr.a));
  L.q.at(tr.s, tr.a) += inc;
  return inc;
}

// Flag-consistent stand-in for the continuous state behind an absorbing
// index, used when the environment has no kinematics of its own.
inline ScenarioState absorbing_scenario(const GridSpec& g, Terminal term) {
  ScenarioState d = g.center(0);
  d.r2 = term == Terminal::kCrash ? 0.0 : g.r_max + 1.0;
  return d;
}

// One learning episode of Algorithm-1 shape: start uniformly inside the
// critical set, follow the adaptive policy, stop on a terminal state, on
// leaving the critical set, or at the horizon. Truncation at a non-terminal
// state is tagged HORIZON. on_update(s, a, first_visit, dq) fires after every
// counted step so callers can maintain the regression system incrementally.
template <class Env, class QMix, class OnUpdate>
Terminal run_episode(LearnerState& L, const Env& env, const QMix& q_mix,
                     Rng& rng, OnUpdate&& on_update, Trajectory* traj = nullptr) {
  if (L.sc->cells.empty()) {
    throw std::invalid_argument("run_episode: empty critical set");
  }
  CellIndex s = L.sc->cells[uniform_index(rng, L.sc->cells.size())];
  const int T = env.grid.horizon;
  Terminal term = Terminal::kHorizon;
  CellIndex last_s = s;
  int last_a = 0;
  for (int t = 0; t < T; ++t) {
    const int a = adaptive_action(s, L, q_mix, env.phi_row(s), rng);
    L.bump_count(s, a);
    const CellIndex next = env.step_cell(s, a, rng);
    Transition tr{s, a, next == env.crash_index() ? 1.0 : 0.0, next};
    const bool first_visit = L.count(s, a) == 1;
    const double dq = densrl_update(L, tr, env);
    on_update(s, a, first_visit, dq);
    last_s = s;
    last_a = a;
    if (traj) {
      double a_av = 0.0;
      if constexpr (requires { env.continuous_step(s, a); }) {
        a_av = env.continuous_step(s, a).a_av;
      }
      traj->steps.push_back(
          {env.grid.center(s), env.grid.joint_action(a), a_av});
    }
    if (next == env.crash_index()) {
      term = Terminal::kCrash;
      break;
    }
    if (next == env.exit_index()) {
      term = Terminal::kExit;
      break;
    }
    s = next;
    if (!L.sc->contains(next)) break;  // tagged HORIZON: truncated, not exited
  }
  if (traj) {
    traj->terminal = term;
    if (term == Terminal::kCrash || term == Terminal::kExit) {
      if constexpr (requires { env.continuous_step(last_s, last_a); }) {
        traj->terminal_state =
            to_scenario(env.continuous_step(last_s, last_a).next);
      } else {
        traj->terminal_state = absorbing_scenario(env.grid, term);
      }
    } else {
      traj->terminal_state = env.grid.center(s);
    }
  }
  ++L.episodes;
  return term;
}

template <class Env, class QMix>
Terminal run_episode(LearnerState& L, const Env& env, const QMix& q_mix,
                     Rng& rng, Trajectory* traj = nullptr) {
  return run_episode(L, env, q_mix, rng,
                     [](CellIndex, int, bool, double) {}, traj);
}

// Largest |Q - Q_alpha| over critical pairs; the learner-vs-mixture residual
// reported in checkpoints.
inline double linf_to_mixture(const LearnerState& L,
                              const std::vector<const QTable*>& tables,
                              const std::vector<double>& alpha) {
  MixtureQ mix{&tables, &alpha};
  double worst = 0.0;
  for (CellIndex s : L.sc->cells) {
    for (int a = 0; a < L.q.n_actions; ++a) {
      worst = std::max(worst, std::abs(L.q.at(s, a) - mix.at(s, a)));
    }
  }
  return worst;
}

}  // namespace adate
