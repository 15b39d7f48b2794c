#pragma once

#include "adate/config.hpp"
#include "adate/grid.hpp"

namespace adate::testsupport {

// Small hand grid with simple edges; used where tests need exact bin math.
inline GridSpec hand_grid() {
  GridSpec g;
  g.edges[0] = {10.0, 20.0, 30.0};            // v_bv
  g.edges[1] = {3.0, 15.0, 30.0, 45.0};       // r1
  g.edges[2] = {-9.0, -3.0, 3.0, 9.0};        // r1dot
  g.edges[3] = {3.0, 15.0, 30.0, 45.0};       // r2
  g.edges[4] = {-9.0, -3.0, 3.0, 9.0};        // r2dot
  g.accel_values = {-4.0, 0.0, 2.0};
  g.dt = 1.0;
  g.horizon = 20;
  g.vehicle_length = 5.0;
  g.v_max = 40.0;
  g.r_max = 45.0;
  return g;
}

inline GridSpec tiny_grid() { return presets::tiny_grid(); }

}  // namespace adate::testsupport
