#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "adate/driver_model.hpp"
#include "adate/grid.hpp"
#include "adate/rng.hpp"
#include "adate/state.hpp"

namespace adate {

// Probability vector over the joint action grid, LV-major indexing.
using ActionDistribution = std::vector<double>;

struct NaturalisticParams {
  double sigma_a = 1.0;  // std of the acceleration noise (m/s^2)
  double rho = 1e-3;     // per-action probability floor before renormalizing

  void validate() const {
    if (!(sigma_a > 0)) {
      throw std::invalid_argument("naturalistic: sigma_a must be > 0");
    }
    if (!(rho >= 0)) throw std::invalid_argument("naturalistic: rho must be >= 0");
  }
};

// Discretized Gaussian around the car-following acceleration: evaluate the
// density at each grid acceleration, normalize, floor at rho, renormalize.
// Every entry ends up >= rho / (1 + n*rho), so the marginal has full support
// whenever rho > 0.
inline std::vector<double> vehicle_marginal(const GridSpec& g,
                                            const DriverModelParams& model,
                                            double gap, double v_self,
                                            double v_lead,
                                            const NaturalisticParams& np) {
  const double a_star = model_accel(model, gap, v_self, v_lead);
  const int n = g.n_vehicle_accels();
  std::vector<double> p(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = (g.accel_values[i] - a_star) / np.sigma_a;
    p[i] = std::exp(-0.5 * z * z);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  sum = 0.0;
  for (double& x : p) {
    if (x < np.rho) x = np.rho;
    sum += x;
  }
  for (double& x : p) x /= sum;
  return p;
}

// phi(.|s): product of the LV marginal (free driving) and the BV marginal
// (following the LV across r1).
inline ActionDistribution naturalistic_policy(CellIndex cell, const GridSpec& g,
                                              const DriverModelParams& lv_model,
                                              const DriverModelParams& bv_model,
                                              const NaturalisticParams& np) {
  if (g.is_terminal(cell)) {
    throw std::invalid_argument("naturalistic_policy: terminal state");
  }
  const ScenarioState s = g.center(cell);
  const double v_lv = s.v_bv + s.r1dot;
  const double inf = std::numeric_limits<double>::infinity();
  const auto p_lv = vehicle_marginal(g, lv_model, inf, v_lv, v_lv, np);
  const auto p_bv = vehicle_marginal(g, bv_model, s.r1, s.v_bv, v_lv, np);
  const int n = g.n_vehicle_accels();
  ActionDistribution joint(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      joint[static_cast<std::size_t>(i) * n + j] = p_lv[i] * p_bv[j];
    }
  }
  return joint;
}

// CDF-walk sample; the final index absorbs any rounding slack.
inline int sample_action(const double* dist, int n, Rng& rng) {
  const double x = uniform01(rng);
  double cum = 0.0;
  for (int i = 0; i < n; ++i) {
    cum += dist[i];
    if (x < cum) return i;
  }
  return n - 1;
}

inline int sample_action(const ActionDistribution& dist, Rng& rng) {
  return sample_action(dist.data(), static_cast<int>(dist.size()), rng);
}

}  // namespace adate
