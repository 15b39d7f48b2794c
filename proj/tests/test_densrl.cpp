#include "adate/densrl.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "adate/surrogate.hpp"
#include "support/synthetic_env.hpp"

namespace adate {
namespace {

using testsupport::SyntheticBernoulliEnv;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConstMix {
  double v = 0.0;
  double at(CellIndex, int) const { return v; }
};

// Learner over a bare 2-action, 3-state table; lets hand examples stay exact.
LearnerState tiny_learner(CriticalSet& sc) {
  QTable q;
  q.n_actions = 2;
  q.n_states = 3;
  q.values.assign(6, 0.0);
  LearnerState L;
  L.q = q;
  L.n.assign(6, 0);
  L.n_state.assign(3, 0);
  sc.member = {1, 1, 1};
  sc.cells = {0, 1, 2};
  sc.v_bar = {1.0, 1.0, 1.0};
  L.sc = &sc;
  return L;
}

TEST(Gap, Cases) {
  EXPECT_DOUBLE_EQ(gap(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(gap(0.2, 0.1), 1.0);
  EXPECT_DOUBLE_EQ(gap(0.1, 0.2), 0.5);
  EXPECT_TRUE(std::isinf(gap(0.1, 0.0)));
  EXPECT_THROW(gap(-0.1, 0.2), std::invalid_argument);
  EXPECT_THROW(gap(0.1, -0.2), std::invalid_argument);
}

TEST(AdaptiveAction, PrefersUnvisited) {
  CriticalSet sc;
  LearnerState L = tiny_learner(sc);
  L.c = 2.0;
  // One prior visit to action 0: exploration scores are (1, 2).
  L.n[0] = 1;
  L.n_state[0] = 1;
  const double phi[2] = {0.5, 0.5};
  Rng rng = make_rng(1, "densrl.unvisited");
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(adaptive_action(0, L, ConstMix{}, phi, rng), 1);
  }
}

TEST(AdaptiveAction, InfiniteGapDominates) {
  CriticalSet sc;
  LearnerState L = tiny_learner(sc);
  // Action 0 heavily visited with a huge finite score; action 1 has q > 0
  // against a zero mixture, an infinite gap.
  L.n[0] = 1;
  L.n[1] = 100;
  L.n_state[0] = 101;
  L.q.at(0, 1) = 0.3;
  const double phi[2] = {0.99, 0.01};
  Rng rng = make_rng(2, "densrl.inf");
  EXPECT_EQ(adaptive_action(0, L, ConstMix{0.0}, phi, rng), 1);
}

TEST(AdaptiveAction, InfiniteTieBrokenByBonusTimesPhi) {
  CriticalSet sc;
  LearnerState L = tiny_learner(sc);
  L.q.at(0, 0) = 0.3;
  L.q.at(0, 1) = 0.3;  // both gaps infinite against a zero mixture
  L.n[0] = 3;
  L.n[1] = 0;
  L.n_state[0] = 3;
  const double phi[2] = {0.5, 0.5};
  Rng rng = make_rng(3, "densrl.inftie");
  // Bonus 2*sqrt(3)/(1+3) vs 2*sqrt(3)/(1+0): unvisited action wins.
  EXPECT_EQ(adaptive_action(0, L, ConstMix{0.0}, phi, rng), 1);
}

TEST(AdaptiveAction, ExactTiesUniform) {
  CriticalSet sc;
  LearnerState L = tiny_learner(sc);
  const double phi[2] = {0.3, 0.7};
  Rng rng = make_rng(4, "densrl.tie");
  // Zero counts, zero gaps: every score is exactly 0.
  int counts[2] = {0, 0};
  for (int i = 0; i < 10000; ++i) {
    ++counts[adaptive_action(0, L, ConstMix{}, phi, rng)];
  }
  EXPECT_NEAR(counts[0] / 10000.0, 0.5, 0.03);
}

TEST(DensrlUpdate, OutsideCriticalSetNoop) {
  CriticalSet sc;
  LearnerState L = tiny_learner(sc);
  sc.member[2] = 0;
  sc.cells = {0, 1};
  Rng r = make_rng(0, "densrl.dummy");
  SyntheticBernoulliEnv dummy_env(3, 1, r);
  const double before = L.q.at(2, 0);
  const double inc =
      densrl_update(L, Transition{2, 0, 1.0, dummy_env.crash_index()}, dummy_env);
  EXPECT_EQ(inc, 0.0);
  EXPECT_EQ(L.q.at(2, 0), before);
}

TEST(DensrlUpdate, FirstVisitCrashSetsOne) {
  Rng r = make_rng(5, "densrl.crash");
  SyntheticBernoulliEnv env(3, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  const CellIndex s = sc.cells[0];
  L.bump_count(s, 1);
  const double inc =
      densrl_update(L, Transition{s, 1, 1.0, env.crash_index()}, env);
  EXPECT_DOUBLE_EQ(inc, 1.0);
  EXPECT_DOUBLE_EQ(L.q.at(s, 1), 1.0);
}

TEST(DensrlUpdate, HandBootstrapTarget) {
  Rng r = make_rng(6, "densrl.boot");
  SyntheticBernoulliEnv env(4, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  ASSERT_GE(sc.cells.size(), 2u);
  const CellIndex s = sc.cells[0];
  const CellIndex nx = sc.cells[1];
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 0.9);
  // Plant next-state values and a prior estimate, then take the 4th visit.
  const int na = env.n_actions();
  for (int a = 0; a < na; ++a) L.q.at(nx, a) = 0.1 * (a + 1);
  L.q.at(s, 0) = 0.2;
  L.n[static_cast<std::size_t>(s) * na + 0] = 3;
  L.n_state[static_cast<std::size_t>(s)] = 3;
  L.bump_count(s, 0);

  double boot = 0.0;
  for (int a = 0; a < na; ++a) boot += L.q.at(nx, a) * env.phi_row(nx)[a];
  const double delta = 0.0 + 0.9 * boot - 0.2;
  const double nu = 1.0 / std::pow(4.0, 0.85);
  const double inc = densrl_update(L, Transition{s, 0, 0.0, nx}, env);
  EXPECT_NEAR(inc, nu * delta, 1e-15);
  EXPECT_NEAR(L.q.at(s, 0), 0.2 + nu * delta, 1e-15);
}

TEST(DensrlUpdate, TerminalBootstrapsZero) {
  Rng r = make_rng(7, "densrl.term");
  SyntheticBernoulliEnv env(3, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  const CellIndex s = sc.cells[0];
  L.q.at(s, 0) = 0.6;
  L.n[static_cast<std::size_t>(s) * env.n_actions()] = 0;
  L.bump_count(s, 0);
  // Exit pays nothing and bootstraps nothing: the estimate collapses to 0.
  const double inc = densrl_update(L, Transition{s, 0, 0.0, env.exit_index()}, env);
  EXPECT_DOUBLE_EQ(inc, -0.6);
  EXPECT_DOUBLE_EQ(L.q.at(s, 0), 0.0);
}

TEST(DensrlUpdate, UncountedVisitThrows) {
  Rng r = make_rng(8, "densrl.uncounted");
  SyntheticBernoulliEnv env(3, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  EXPECT_THROW(
      densrl_update(L, Transition{sc.cells[0], 0, 1.0, env.crash_index()}, env),
      std::logic_error);
}

TEST(RunEpisode, ZeroPreservationBoundednessCounts) {
  Rng r = make_rng(9, "densrl.props");
  SyntheticBernoulliEnv env(12, 2, r);
  // Make a third of the cells harmless so the critical set is a strict subset.
  const int na = env.n_actions();
  for (CellIndex s = 0; s < env.cell_count(); s += 3) {
    for (int a = 0; a < na; ++a) env.crash_prob[s * na + a] = 0.0;
  }
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  ASSERT_GT(sc.cells.size(), 0u);
  ASSERT_LT(sc.cells.size(), static_cast<std::size_t>(env.cell_count()));

  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  Rng ep = make_rng(10, "densrl.ep");
  for (int i = 0; i < 2000; ++i) run_episode(L, env, ConstMix{}, ep);

  for (CellIndex s = 0; s < env.cell_count(); ++s) {
    for (int a = 0; a < na; ++a) {
      if (!sc.contains(s)) {
        EXPECT_EQ(L.q.at(s, a), 0.0);
      }
      EXPECT_GE(L.q.at(s, a), 0.0);
      EXPECT_LE(L.q.at(s, a), 1.0);
    }
  }
  std::uint64_t total = 0;
  for (std::uint32_t c : L.n) total += c;
  EXPECT_EQ(total, L.total_steps);
  EXPECT_EQ(L.episodes, 2000u);
  // Every episode on this environment terminates in exactly one step.
  EXPECT_EQ(L.total_steps, 2000u);
}

TEST(RunEpisode, ConvergesToExactValues) {
  Rng r = make_rng(11, "densrl.conv");
  SyntheticBernoulliEnv env(6, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  // Mixture anchored at the exact table: the gap term shrinks as the learner
  // converges, which is the regime the adaptive policy is built for.
  std::vector<const QTable*> tables{&exact};
  std::vector<double> alpha{1.0};
  MixtureQ mix{&tables, &alpha};
  Rng ep = make_rng(12, "densrl.conv.ep");
  for (int i = 0; i < 60000; ++i) run_episode(L, env, mix, ep);
  double worst = 0.0;
  for (CellIndex s : sc.cells) {
    for (int a = 0; a < env.n_actions(); ++a) {
      worst = std::max(worst, std::abs(L.q.at(s, a) - exact.at(s, a)));
    }
  }
  EXPECT_LE(worst, 0.05);
}

TEST(RunEpisode, Deterministic) {
  Rng r = make_rng(13, "densrl.det");
  SyntheticBernoulliEnv env(6, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  auto run = [&] {
    LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
    Rng ep = make_rng(99, "densrl.det.ep");
    for (int i = 0; i < 500; ++i) run_episode(L, env, ConstMix{}, ep);
    return L;
  };
  const LearnerState a = run();
  const LearnerState b = run();
  EXPECT_EQ(a.q.values, b.q.values);
  EXPECT_EQ(a.n, b.n);
  EXPECT_EQ(a.total_steps, b.total_steps);
}

TEST(RunEpisode, EmptyCriticalSetRejected) {
  Rng r = make_rng(14, "densrl.empty");
  SyntheticBernoulliEnv env(3, 2, r);
  CriticalSet sc;
  sc.member.assign(static_cast<std::size_t>(env.grid.state_count()), 0);
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  Rng ep = make_rng(15, "densrl.empty.ep");
  EXPECT_THROW(run_episode(L, env, ConstMix{}, ep), std::invalid_argument);
}

TEST(MixtureQ, LazyDotProduct) {
  Rng r = make_rng(16, "densrl.mix");
  SyntheticBernoulliEnv env(3, 2, r);
  QTable q1 = env.exact_q();
  QTable q2 = env.exact_q();
  for (double& x : q2.values) x *= 0.5;
  std::vector<const QTable*> tables{&q1, &q2};
  std::vector<double> alpha{0.25, 0.75};
  MixtureQ mix{&tables, &alpha};
  EXPECT_NEAR(mix.at(1, 1), 0.25 * q1.at(1, 1) + 0.75 * q2.at(1, 1), 1e-15);
}

TEST(LinfToMixture, ReportsWorstResidual) {
  Rng r = make_rng(17, "densrl.linf");
  SyntheticBernoulliEnv env(3, 2, r);
  QTable exact = env.exact_q();
  CriticalSet sc = critical_set({&exact}, env);
  LearnerState L = LearnerState::init(env.grid, sc, 2.0, 0.85, 1.0);
  // Learner at exactly the table: residual 0 against alpha = (1).
  L.q = exact;
  std::vector<const QTable*> tables{&exact};
  EXPECT_DOUBLE_EQ(linf_to_mixture(L, tables, {1.0}), 0.0);
  L.q.at(sc.cells[0], 0) += 0.125;
  EXPECT_DOUBLE_EQ(linf_to_mixture(L, tables, {1.0}), 0.125);
}

}  // namespace
}  // namespace adate
