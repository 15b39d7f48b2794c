#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adate/densrl.hpp"
#include "adate/env.hpp"
#include "adate/rng.hpp"
#include "adate/simplex_lsq.hpp"
#include "adate/surrogate.hpp"

namespace adate {

// Coefficient iterates indexed from k = 1, with the boundary rule that
// indices before the first iterate read as the first iterate.
struct CoefficientHistory {
  int delta = 10;
  double threshold = 0.02;
  std::vector<MixtureWeights> alphas;
  std::vector<double> asd_values;

  int size() const { return static_cast<int>(alphas.size()); }
  const std::vector<double>& at(int k) const {
    return alphas[static_cast<std::size_t>(k < 1 ? 0 : k - 1)].alpha;
  }
};

// Average sliding difference at iteration k: per coefficient, sum the
// stride-delta differences across the last delta iterates, average the
// absolute sums over coefficients.
inline double asd(const CoefficientHistory& h, int k) {
  if (h.alphas.empty() || k < 1 || k > h.size()) {
    throw std::invalid_argument("asd: iteration outside recorded history");
  }
  const std::size_t j = h.alphas[0].alpha.size();
  double total = 0.0;
  for (std::size_t c = 0; c < j; ++c) {
    double acc = 0.0;
    for (int kp = k - h.delta + 1; kp <= k; ++kp) {
      acc += h.at(kp)[c] - h.at(kp - h.delta)[c];
    }
    total += std::abs(acc);
  }
  return total / static_cast<double>(j);
}

struct AdateOptions {
  double c = 2.0;
  double omega = 0.85;
  double gamma = 1.0;
  int delta = 10;
  double asd_threshold = 0.02;
  std::uint64_t max_episodes = 200000;
  int solve_interval = 1;  // episodes per coefficient update
  std::uint64_t seed = 0;
};

struct AdateResult {
  MixtureWeights alpha;
  CoefficientHistory history;
  LearnerState learner;
  std::string terminated_by;  // "asd" or "max_episodes"
  std::uint64_t episodes = 0;
};

// Full generation loop: learn Q with the adaptive policy against the current
// mixture, refit the coefficients on the visited critical pairs after every
// episode, stop once the coefficients stop sliding (ASD below threshold after
// the 2*delta burn-in) or at the episode cap.
template <class Env>
AdateResult adate_generate(const std::vector<const QTable*>& sm_tables,
                           const Env& env, const CriticalSet& sc,
                           const AdateOptions& opt) {
  const std::size_t j = sm_tables.size();
  if (j < 1) throw std::invalid_argument("adate_generate: no surrogate tables");
  if (sc.cells.empty()) {
    throw std::invalid_argument("adate_generate: empty critical set");
  }
  AdateResult res;
  res.history.delta = opt.delta;
  res.history.threshold = opt.asd_threshold;
  res.alpha.alpha.assign(j, 1.0 / static_cast<double>(j));
  res.learner =
      LearnerState::init(env.grid, sc, opt.c, opt.omega, opt.gamma);
  RegressionAccum accum(static_cast<int>(j));
  std::vector<double> m_row(j);

  const MixtureQ mix{&sm_tables, &res.alpha.alpha};
  auto hook = [&](CellIndex s, int a, bool first_visit, double dq) {
    for (std::size_t t = 0; t < j; ++t) m_row[t] = sm_tables[t]->at(s, a);
    if (first_visit) {
      accum.add_pair(m_row.data(), res.learner.q.at(s, a));
    } else {
      accum.bump_y(m_row.data(), dq);
    }
  };

  res.terminated_by = "max_episodes";
  while (res.episodes < opt.max_episodes) {
    Rng rng = make_rng(opt.seed, "adate.episode", res.episodes);
    run_episode(res.learner, env, mix, rng, hook);
    ++res.episodes;
    if (res.episodes % static_cast<std::uint64_t>(opt.solve_interval) != 0) {
      continue;
    }
    res.alpha = accum.solve();
    res.history.alphas.push_back(res.alpha);
    const int k = res.history.size();
    const double a = asd(res.history, k);
    res.history.asd_values.push_back(a);
    if (k >= 2 * opt.delta && a < opt.asd_threshold) {
      res.terminated_by = "asd";
      break;
    }
  }
  return res;
}

}  // namespace adate
