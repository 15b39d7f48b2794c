#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "adate/driver_model.hpp"
#include "adate/grid.hpp"
#include "adate/mdp.hpp"
#include "adate/policy.hpp"
#include "adate/rng.hpp"
#include "adate/state.hpp"

namespace adate {

// Every cell center must embed to legal velocities, otherwise the snapped
// chain would silently clamp kinematics the state claims to have.
inline void validate_embedding(const GridSpec& g) {
  const CellIndex n = g.cell_count();
  for (CellIndex c = 0; c < n; ++c) {
    const KinematicState k = to_kinematic(g.center(c));
    for (double v : {k.v_lv, k.v_bv, k.v_av}) {
      if (!(v >= 0.0 && v <= g.v_max)) {
        throw std::invalid_argument(
            "grid: cell center " + std::to_string(c) +
            " implies a velocity outside [0, v_max]; widen v_max or shrink "
            "the rate dimensions");
      }
    }
  }
}

// Per-cell naturalistic action distribution, flat [cell * n_actions + a].
inline std::vector<double> build_phi(const GridSpec& g,
                                     const DriverModelParams& lv_model,
                                     const DriverModelParams& bv_model,
                                     const NaturalisticParams& np) {
  const CellIndex n = g.cell_count();
  const int na = g.n_actions();
  std::vector<double> phi(static_cast<std::size_t>(n) * na);
  for (CellIndex c = 0; c < n; ++c) {
    const ActionDistribution d =
        naturalistic_policy(c, g, lv_model, bv_model, np);
    std::copy(d.begin(), d.end(), phi.begin() + static_cast<std::size_t>(c) * na);
  }
  return phi;
}

// Deterministic successor table for a fixed subject model standing as the AV.
inline std::vector<CellIndex> build_successors(const GridSpec& g,
                                               const DriverModelParams& av) {
  const CellIndex n = g.cell_count();
  const int na = g.n_actions();
  std::vector<CellIndex> succ(static_cast<std::size_t>(n) * na);
  for (CellIndex c = 0; c < n; ++c) {
    for (int a = 0; a < na; ++a) {
      succ[static_cast<std::size_t>(c) * na + a] = chain_successor(g, c, a, av);
    }
  }
  return succ;
}

// The discretized overtaking chain: deterministic successors under a fixed
// AV model plus the shared naturalistic action distribution. This is the
// single environment the DP tables, the learner, and the test campaigns all
// walk, so dynamic-programming values are exact for every consumer.
struct GridChainEnv {
  GridSpec grid;
  DriverModelParams av_model;
  std::vector<CellIndex> succ;
  std::vector<double> phi;

  GridChainEnv(const GridSpec& g, const DriverModelParams& av,
               const std::vector<double>& phi_table)
      : grid(g), av_model(av), phi(phi_table) {
    grid.validate();
    av_model.validate();
    validate_embedding(grid);
    if (phi.size() != static_cast<std::size_t>(grid.cell_count()) *
                          grid.n_actions()) {
      throw std::invalid_argument("env: phi table size mismatch");
    }
    succ = build_successors(grid, av_model);
  }

  int n_actions() const { return grid.n_actions(); }
  CellIndex cell_count() const { return grid.cell_count(); }
  CellIndex crash_index() const { return grid.crash_index(); }
  CellIndex exit_index() const { return grid.exit_index(); }
  bool is_terminal(CellIndex s) const { return grid.is_terminal(s); }

  const double* phi_row(CellIndex s) const {
    return phi.data() + static_cast<std::size_t>(s) * grid.n_actions();
  }
  CellIndex successor(CellIndex s, int a) const {
    return succ[static_cast<std::size_t>(s) * grid.n_actions() + a];
  }
  // Environment concept used by episode runners; rng unused here because the
  // snapped chain is deterministic given the action.
  CellIndex step_cell(CellIndex s, int a, Rng&) const { return successor(s, a); }

  // Continuous kinematics behind the snapped transition, for trajectory export.
  StepResult continuous_step(CellIndex s, int a) const {
    return step(to_kinematic(grid.center(s)), grid.joint_action(a), av_model,
                grid);
  }
};

// Axis-aligned box of cell centers used as the initial-state distribution
// (uniform over member cells); shared across all campaign kinds.
struct InitBox {
  std::array<double, kStateDims> lo{};
  std::array<double, kStateDims> hi{};

  static InitBox whole(const GridSpec& g) {
    InitBox b;
    for (int d = 0; d < kStateDims; ++d) {
      b.lo[d] = g.edges[d].front();
      b.hi[d] = g.edges[d].back();
    }
    return b;
  }

  bool contains(const ScenarioState& s) const {
    const auto v = s.as_array();
    for (int d = 0; d < kStateDims; ++d) {
      if (v[d] < lo[d] || v[d] > hi[d]) return false;
    }
    return true;
  }
};

inline std::vector<CellIndex> init_cells(const GridSpec& g, const InitBox& box) {
  std::vector<CellIndex> cells;
  const CellIndex n = g.cell_count();
  for (CellIndex c = 0; c < n; ++c) {
    if (box.contains(g.center(c))) cells.push_back(c);
  }
  if (cells.empty()) {
    throw std::invalid_argument("init box contains no grid cell centers");
  }
  return cells;
}

}  // namespace adate
