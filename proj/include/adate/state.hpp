#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

namespace adate {

// Index into the flattened state space. Values in [0, cell_count) are grid
// cells; cell_count is CRASH and cell_count+1 is EXIT.
using CellIndex = std::int64_t;

enum class Terminal : int { kNone = 0, kCrash = 1, kExit = 2, kHorizon = 3 };

inline const char* to_string(Terminal t) {
  switch (t) {
    case Terminal::kNone:
      return "NONE";
    case Terminal::kCrash:
      return "CRASH";
    case Terminal::kExit:
      return "EXIT";
    case Terminal::kHorizon:
      return "HORIZON";
  }
  return "NONE";
}

// Absolute longitudinal positions and speeds of the three vehicles.
// LV leads the BV; the BV leads the AV under test.
struct KinematicState {
  double x_lv = 0.0;
  double x_bv = 0.0;
  double x_av = 0.0;
  double v_lv = 0.0;
  double v_bv = 0.0;
  double v_av = 0.0;

  bool finite() const {
    return std::isfinite(x_lv) && std::isfinite(x_bv) && std::isfinite(x_av) &&
           std::isfinite(v_lv) && std::isfinite(v_bv) && std::isfinite(v_av);
  }
};

// Relative scenario coordinates: r1 = x_lv - x_bv, r1dot = v_lv - v_bv,
// r2 = x_bv - x_av, r2dot = v_bv - v_av.
struct ScenarioState {
  double v_bv = 0.0;
  double r1 = 0.0;
  double r1dot = 0.0;
  double r2 = 0.0;
  double r2dot = 0.0;

  std::array<double, 5> as_array() const { return {v_bv, r1, r1dot, r2, r2dot}; }
};

inline ScenarioState to_scenario(const KinematicState& k) {
  return {k.v_bv, k.x_lv - k.x_bv, k.v_lv - k.v_bv, k.x_bv - k.x_av,
          k.v_bv - k.v_av};
}

// Canonical embedding with the AV at the origin. Inverse of to_scenario up to
// the (physically irrelevant) absolute position offset.
inline KinematicState to_kinematic(const ScenarioState& s) {
  KinematicState k;
  k.x_av = 0.0;
  k.x_bv = s.r2;
  k.x_lv = s.r2 + s.r1;
  k.v_bv = s.v_bv;
  k.v_lv = s.v_bv + s.r1dot;
  k.v_av = s.v_bv - s.r2dot;
  return k;
}

// Accelerations commanded to the background vehicles this step. The AV's
// acceleration comes from its driver model, not from the action.
struct JointAction {
  double a_lv = 0.0;
  double a_bv = 0.0;
};

}  // namespace adate
