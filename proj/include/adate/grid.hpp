#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "adate/hash.hpp"
#include "adate/state.hpp"

namespace adate {

// State dimension order used everywhere: [v_bv, r1, r1dot, r2, r2dot].
inline constexpr int kStateDims = 5;
inline constexpr const char* kDimNames[kStateDims] = {"v_bv", "r1", "r1dot",
                                                      "r2", "r2dot"};

// Discretization of the scenario state space plus the shared acceleration
// grid and episode constants. Bin convention: x lands in bin i iff
// edges[i] <= x < edges[i+1]; the last bin is closed on the right.
struct GridSpec {
  std::array<std::vector<double>, kStateDims> edges;
  std::vector<double> accel_values;  // per-vehicle, shared by LV and BV

  double dt = 0.1;              // seconds per step
  int horizon = 200;            // max steps per episode
  double vehicle_length = 5.0;  // crash threshold on r2 (m)
  double v_max = 50.0;          // speed clamp (m/s)
  double r_max = 65.0;          // ranges beyond this exit the scenario (m)

  int bins(int d) const { return static_cast<int>(edges[d].size()) - 1; }

  CellIndex cell_count() const {
    CellIndex n = 1;
    for (int d = 0; d < kStateDims; ++d) n *= bins(d);
    return n;
  }
  CellIndex crash_index() const { return cell_count(); }
  CellIndex exit_index() const { return cell_count() + 1; }
  CellIndex state_count() const { return cell_count() + 2; }
  bool is_terminal(CellIndex s) const { return s >= cell_count(); }

  int n_vehicle_accels() const { return static_cast<int>(accel_values.size()); }
  // Joint actions are indexed LV-major: a = i_lv * n + i_bv.
  int n_actions() const { return n_vehicle_accels() * n_vehicle_accels(); }
  JointAction joint_action(int a) const {
    const int n = n_vehicle_accels();
    return {accel_values[a / n], accel_values[a % n]};
  }
  int action_index(int i_lv, int i_bv) const {
    return i_lv * n_vehicle_accels() + i_bv;
  }

  // Bin containing x, or -1 when x is outside [front, back].
  int bin_of(int d, double x) const {
    const auto& e = edges[d];
    if (!(x >= e.front()) || !(x <= e.back())) return -1;
    int i = static_cast<int>(std::upper_bound(e.begin(), e.end(), x) -
                             e.begin()) -
            1;
    if (i == bins(d)) --i;  // x == e.back(): last bin is closed
    return i;
  }

  // Row-major flattening of per-dimension bin coordinates.
  CellIndex cell_of(const std::array<int, kStateDims>& c) const {
    CellIndex idx = 0;
    for (int d = 0; d < kStateDims; ++d) idx = idx * bins(d) + c[d];
    return idx;
  }
  std::array<int, kStateDims> coords_of(CellIndex cell) const {
    std::array<int, kStateDims> c{};
    for (int d = kStateDims - 1; d >= 0; --d) {
      c[d] = static_cast<int>(cell % bins(d));
      cell /= bins(d);
    }
    return c;
  }

  double center_of_bin(int d, int i) const {
    return 0.5 * (edges[d][i] + edges[d][i + 1]);
  }
  ScenarioState center(CellIndex cell) const {
    const auto c = coords_of(cell);
    return {center_of_bin(0, c[0]), center_of_bin(1, c[1]),
            center_of_bin(2, c[2]), center_of_bin(3, c[3]),
            center_of_bin(4, c[4])};
  }

  // Crash dominates; any other out-of-range component exits.
  CellIndex discretize(const ScenarioState& s) const {
    if (s.r2 <= vehicle_length) return crash_index();
    const auto v = s.as_array();
    std::array<int, kStateDims> c{};
    for (int d = 0; d < kStateDims; ++d) {
      c[d] = bin_of(d, v[d]);
      if (c[d] < 0) return exit_index();
    }
    return cell_of(c);
  }

  void validate() const {
    for (int d = 0; d < kStateDims; ++d) {
      if (edges[d].size() < 2) {
        throw std::invalid_argument(std::string("grid: dimension ") +
                                    kDimNames[d] + " needs at least one bin");
      }
      for (std::size_t i = 1; i < edges[d].size(); ++i) {
        if (!(edges[d][i - 1] < edges[d][i])) {
          throw std::invalid_argument(std::string("grid: edges for ") +
                                      kDimNames[d] +
                                      " must be strictly increasing");
        }
      }
    }
    if (accel_values.empty()) {
      throw std::invalid_argument("grid: empty acceleration grid");
    }
    for (std::size_t i = 1; i < accel_values.size(); ++i) {
      if (!(accel_values[i - 1] < accel_values[i])) {
        throw std::invalid_argument(
            "grid: acceleration grid must be strictly increasing");
      }
    }
    if (!(dt > 0)) throw std::invalid_argument("grid: dt must be positive");
    if (horizon < 1) throw std::invalid_argument("grid: horizon must be >= 1");
    if (!(v_max > 0)) throw std::invalid_argument("grid: v_max must be positive");
    if (!(r_max > vehicle_length)) {
      throw std::invalid_argument("grid: r_max must exceed vehicle_length");
    }
  }

  // Content hash; embedded in persisted tables so artifacts from different
  // grids cannot be mixed silently.
  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64("adate.grid");
    for (int d = 0; d < kStateDims; ++d) {
      h = hash_combine(h, static_cast<std::uint64_t>(edges[d].size()));
      for (double e : edges[d]) h = hash_combine(h, e);
    }
    h = hash_combine(h, static_cast<std::uint64_t>(accel_values.size()));
    for (double a : accel_values) h = hash_combine(h, a);
    h = hash_combine(h, dt);
    h = hash_combine(h, static_cast<std::uint64_t>(horizon));
    h = hash_combine(h, vehicle_length);
    h = hash_combine(h, v_max);
    h = hash_combine(h, r_max);
    return h;
  }
};

// Uniform bin edges over [lo, hi].
inline std::vector<double> uniform_edges(double lo, double hi, int bins) {
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) {
    e[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  }
  return e;
}

}  // namespace adate
