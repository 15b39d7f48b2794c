#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "adate/env.hpp"
#include "adate/policy.hpp"
#include "adate/qtable.hpp"
#include "adate/rng.hpp"
#include "adate/surrogate.hpp"

namespace adate {

// Two-sided standard-normal quantile at the given confidence level:
// z with P(|Z| <= z) = confidence. Rational initial guess (Acklam) refined by
// two Newton steps against erfc, accurate to the last few ulps.
inline double normal_quantile_two_sided(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw std::invalid_argument("confidence must be in (0, 1)");
  }
  const double p = 0.5 + 0.5 * confidence;  // upper-tail point
  const double q = 1.0 - p;                 // in (0, 0.5): lower-tail mass
  double x;
  if (q >= 0.02425) {
    const double r = q - 0.5;
    const double t = r * r;
    const double num =
        (((((-39.69683028665376 * t + 220.9460984245205) * t -
            275.9285104469687) *
               t +
           138.3577518672690) *
              t -
          30.66479806614716) *
             t +
         2.506628277459239) *
        r;
    const double den =
        ((((-54.47609879822406 * t + 161.5858368580409) * t -
           155.6989798598866) *
              t +
          66.80131188771972) *
             t -
         13.28068155288572) *
            t +
        1.0;
    x = -(num / den);
  } else {
    const double t = std::sqrt(-2.0 * std::log(q));
    const double num =
        (((((-0.007784894002430293 * t - 0.3223964580411365) * t -
            2.400758277161838) *
               t -
           2.549732539343734) *
              t +
          4.374664141464968) *
             t +
         2.938163982698783);
    const double den =
        (((0.007784695709041462 * t + 0.3224671290700398) * t +
          2.445134137142996) *
             t +
         3.754408661907416) *
            t +
        1.0;
    x = -(num / den);
  }
  // Polish against the upper-tail survival probability: near x > 0 the
  // complementary error function keeps full relative precision where the CDF
  // itself has already saturated toward 1.
  constexpr double kSqrt2Pi = 2.5066282746310002;
  for (int i = 0; i < 3; ++i) {
    const double tail_err = 0.5 * std::erfc(x / std::sqrt(2.0)) - q;
    const double pdf = std::exp(-0.5 * x * x) / kSqrt2Pi;
    x += tail_err / pdf;
  }
  return x;
}

// One test outcome. weight is the accumulated likelihood ratio (1 for
// episodes never controlled); the estimator term is crash * weight.
struct WeightedSample {
  double crash = 0.0;
  double weight = 1.0;
  int length = 0;
  std::uint64_t seed_tag = 0;

  double term() const { return crash * weight; }
};

struct Estimate {
  std::size_t n = 0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double rhw = std::numeric_limits<double>::infinity();
};

inline Estimate estimate(const std::vector<WeightedSample>& samples,
                         double confidence = 0.95) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("estimate: no samples");
  double sum = 0.0;
  for (const auto& s : samples) sum += s.term();
  const double mu = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& s : samples) {
    const double d = s.term() - mu;
    ss += d * d;
  }
  const double sigma2 = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  Estimate e;
  e.n = n;
  e.mu = mu;
  e.sigma2 = sigma2;
  // A single sample has no variance estimate, so its width stays infinite.
  if (mu > 0.0 && n > 1) {
    const double z = normal_quantile_two_sided(confidence);
    e.rhw = z * std::sqrt(sigma2) / (std::sqrt(static_cast<double>(n)) * mu);
  }
  return e;
}

// Smallest prefix length >= n_min whose running relative half-width reaches
// the threshold; nullopt if the stream never converges.
inline std::optional<std::size_t> required_tests(
    const std::vector<WeightedSample>& samples, double threshold = 0.3,
    std::size_t n_min = 100, double confidence = 0.95) {
  if (!(threshold > 0.0)) throw std::invalid_argument("threshold must be > 0");
  const double z = normal_quantile_two_sided(confidence);
  double sum = 0.0;
  double sumsq = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = samples[i].term();
    sum += t;
    sumsq += t * t;
    const std::size_t n = i + 1;
    if (n < n_min || n < 2) continue;
    const double mu = sum / static_cast<double>(n);
    if (!(mu > 0.0)) continue;
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n) * mu * mu) /
                          static_cast<double>(n - 1));
    const double rhw =
        z * std::sqrt(var) / (std::sqrt(static_cast<double>(n)) * mu);
    if (rhw <= threshold) return n;
  }
  return std::nullopt;
}

struct BootstrapSummary {
  double mean = 0.0;        // over replicates that reached the threshold
  std::size_t min = 0;
  std::size_t max = 0;
  std::size_t unreached = 0;  // replicates whose RHW never converged
  std::vector<std::size_t> values;
};

// Shuffle-and-rescan bootstrap of the required-test count.
inline BootstrapSummary bootstrap_required_tests(
    const std::vector<WeightedSample>& samples, double threshold,
    std::size_t n_min, int reps, Rng& rng, double confidence = 0.95) {
  if (reps < 1) throw std::invalid_argument("bootstrap: reps must be >= 1");
  BootstrapSummary out;
  out.min = std::numeric_limits<std::size_t>::max();
  std::vector<WeightedSample> work = samples;
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    fisher_yates_shuffle(work, rng);
    const auto n = required_tests(work, threshold, n_min, confidence);
    if (!n) {
      ++out.unreached;
      continue;
    }
    out.values.push_back(*n);
    acc += static_cast<double>(*n);
    out.min = std::min(out.min, *n);
    out.max = std::max(out.max, *n);
  }
  if (!out.values.empty()) {
    out.mean = acc / static_cast<double>(out.values.size());
  } else {
    out.min = 0;
  }
  return out;
}

struct AarResult {
  long long rounded = 0;
  double ratio = 0.0;
};

inline AarResult aar(double n_nde, double n_env) {
  if (!(n_env > 0.0)) throw std::invalid_argument("aar: n_env must be > 0");
  AarResult r;
  r.ratio = n_nde / n_env;
  r.rounded = std::llround(r.ratio);
  return r;
}

// Defensively mixed importance policy over the critical cells:
// psi_tilde = (1 - eps) * sum_j alpha_j psi_j + eps * phi, stored densely per
// critical cell. eps > 0 keeps every phi-supported action sampleable.
struct IsPolicyPack {
  const CriticalSet* sc = nullptr;
  double eps = 0.1;
  int n_actions = 0;
  std::vector<std::uint32_t> slot;  // state -> 1 + row position, 0 = uncontrolled
  std::vector<double> rows;

  const double* row(CellIndex s) const {
    return rows.data() +
           static_cast<std::size_t>(slot[static_cast<std::size_t>(s)] - 1) *
               n_actions;
  }
  bool controlled(CellIndex s) const {
    return slot[static_cast<std::size_t>(s)] != 0;
  }
};

template <class Env>
IsPolicyPack build_is_pack(const std::vector<const QTable*>& tables,
                           const std::vector<double>& alpha, const Env& env,
                           const CriticalSet& sc, double eps) {
  if (tables.empty() || tables.size() != alpha.size()) {
    throw std::invalid_argument("is pack: tables/alpha mismatch");
  }
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("is pack: eps must be in [0, 1)");
  }
  IsPolicyPack pack;
  pack.sc = &sc;
  pack.eps = eps;
  pack.n_actions = env.n_actions();
  pack.slot.assign(sc.member.size(), 0);
  pack.rows.assign(sc.cells.size() * static_cast<std::size_t>(pack.n_actions),
                   0.0);
  std::vector<ActionDistribution> psis(tables.size());
  for (std::size_t i = 0; i < sc.cells.size(); ++i) {
    const CellIndex s = sc.cells[i];
    pack.slot[static_cast<std::size_t>(s)] = static_cast<std::uint32_t>(i + 1);
    for (std::size_t t = 0; t < tables.size(); ++t) {
      psis[t] = importance_policy(*tables[t], env, s);
    }
    const ActionDistribution mixed = mixture_policy(alpha, psis);
    const double* phi = env.phi_row(s);
    double* out = pack.rows.data() + i * static_cast<std::size_t>(pack.n_actions);
    for (int a = 0; a < pack.n_actions; ++a) {
      out[a] = (1.0 - eps) * mixed[a] + eps * phi[a];
    }
  }
  return pack;
}

// Naturalistic rollout: actions always from phi, weight identically 1.
template <class Env>
WeightedSample run_nde_episode(const Env& env,
                               const std::vector<CellIndex>& init,
                               Rng& rng) {
  CellIndex s = init[uniform_index(rng, init.size())];
  WeightedSample out;
  for (int t = 0; t < env.grid.horizon; ++t) {
    const int a = sample_action(env.phi_row(s), env.n_actions(), rng);
    const CellIndex next = env.step_cell(s, a, rng);
    ++out.length;
    if (next == env.crash_index()) {
      out.crash = 1.0;
      return out;
    }
    if (next == env.exit_index()) return out;
    s = next;
  }
  return out;
}

// Importance-sampled rollout: controlled cells draw from the pack and
// multiply the ratio phi/psi_tilde; uncontrolled cells stay naturalistic with
// factor one.
template <class Env>
WeightedSample run_is_episode(const Env& env, const std::vector<CellIndex>& init,
                              const IsPolicyPack& pack, Rng& rng) {
  CellIndex s = init[uniform_index(rng, init.size())];
  WeightedSample out;
  for (int t = 0; t < env.grid.horizon; ++t) {
    const double* phi = env.phi_row(s);
    int a;
    if (pack.controlled(s)) {
      const double* psi = pack.row(s);
      a = sample_action(psi, env.n_actions(), rng);
      if (!(psi[a] > 0.0)) {
        throw std::logic_error("is episode: sampled action has zero density");
      }
      out.weight *= phi[a] / psi[a];
    } else {
      a = sample_action(phi, env.n_actions(), rng);
    }
    const CellIndex next = env.step_cell(s, a, rng);
    ++out.length;
    if (next == env.crash_index()) {
      out.crash = 1.0;
      return out;
    }
    if (next == env.exit_index()) return out;
    s = next;
  }
  return out;
}

enum class EnvKind : int { kNde = 0, kNade = 1, kAdate = 2 };

inline const char* to_string(EnvKind k) {
  switch (k) {
    case EnvKind::kNde:
      return "nde";
    case EnvKind::kNade:
      return "nade";
    case EnvKind::kAdate:
      return "adate";
  }
  return "nde";
}

// Episode-indexed seed streams make the campaign independent of thread count
// and merge order; results land in episode order by construction.
template <class Env>
std::vector<WeightedSample> run_campaign(const Env& env,
                                         const std::vector<CellIndex>& init,
                                         const IsPolicyPack* pack,
                                         std::size_t episodes,
                                         std::uint64_t master_seed,
                                         std::string_view label,
                                         int threads = 1) {
  std::vector<WeightedSample> out(episodes);
  auto worker = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng = make_rng(master_seed, label, i);
      out[i] = pack ? run_is_episode(env, init, *pack, rng)
                    : run_nde_episode(env, init, rng);
      out[i].seed_tag = derive_seed(master_seed, label, i);
    }
  };
  if (threads <= 1 || episodes < 2) {
    worker(0, episodes);
    return out;
  }
  const std::size_t n_threads =
      std::min<std::size_t>(static_cast<std::size_t>(threads), episodes);
  std::vector<std::thread> pool;
  const std::size_t chunk = (episodes + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    const std::size_t lo = t * chunk;
    const std::size_t hi = std::min(episodes, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(worker, lo, hi);
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace adate
