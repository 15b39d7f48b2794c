#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "adate/driver_model.hpp"
#include "adate/grid.hpp"
#include "adate/io.hpp"
#include "adate/state.hpp"

namespace adate {

inline bool is_crash(const ScenarioState& s, const GridSpec& g) {
  return s.r2 <= g.vehicle_length;
}

struct StepResult {
  KinematicState next;
  Terminal term = Terminal::kNone;
  double a_av = 0.0;  // acceleration the AV model commanded this step
};

// One dt of constant-acceleration kinematics for all three vehicles. The AV
// reacts to the BV through its driver model; LV and BV follow the action.
inline StepResult step(const KinematicState& k, const JointAction& a,
                       const DriverModelParams& av_model, const GridSpec& g) {
  if (!k.finite()) throw std::invalid_argument("step: non-finite state");
  if (!(std::isfinite(a.a_lv) && std::isfinite(a.a_bv))) {
    throw std::invalid_argument("step: non-finite action");
  }
  const ScenarioState s = to_scenario(k);
  const double a_av = model_accel(av_model, s.r2, k.v_av, k.v_bv);

  auto advance = [&](double& x, double& v, double acc) {
    x += v * g.dt + 0.5 * acc * g.dt * g.dt;
    v = std::clamp(v + acc * g.dt, 0.0, g.v_max);
  };
  StepResult r;
  r.next = k;
  r.a_av = a_av;
  advance(r.next.x_lv, r.next.v_lv, a.a_lv);
  advance(r.next.x_bv, r.next.v_bv, a.a_bv);
  advance(r.next.x_av, r.next.v_av, a_av);

  const ScenarioState n = to_scenario(r.next);
  if (n.r2 <= g.vehicle_length) {
    r.term = Terminal::kCrash;
  } else if (n.r1 <= g.vehicle_length || n.r1 > g.r_max || n.r2 > g.r_max) {
    r.term = Terminal::kExit;
  }
  return r;
}

// Successor cell of (cell, action) on the snapped chain: step from the cell
// center, honor the step's own terminal classification, then re-discretize.
inline CellIndex chain_successor(const GridSpec& g, CellIndex cell, int action,
                                 const DriverModelParams& av_model) {
  const StepResult r = step(to_kinematic(g.center(cell)), g.joint_action(action),
                            av_model, g);
  if (r.term == Terminal::kCrash) return g.crash_index();
  if (r.term == Terminal::kExit) return g.exit_index();
  return g.discretize(to_scenario(r.next));
}

struct TrajectoryStep {
  ScenarioState s;
  JointAction a;
  double a_av = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  ScenarioState terminal_state;
  Terminal terminal = Terminal::kNone;

  static const char* csv_header() {
    return "t,v_BV,R1,R1dot,R2,R2dot,a_LV,a_BV,a_AV,terminal_flag";
  }

  std::string to_csv() const {
    std::string out(csv_header());
    out += '\n';
    auto row = [&](int t, const ScenarioState& s, double a_lv, double a_bv,
                   double a_av, const char* flag) {
      out += std::to_string(t);
      for (double v : s.as_array()) {
        out += ',';
        out += fmt_double(v);
      }
      out += ',';
      out += fmt_double(a_lv);
      out += ',';
      out += fmt_double(a_bv);
      out += ',';
      out += fmt_double(a_av);
      out += ',';
      out += flag;
      out += '\n';
    };
    for (std::size_t i = 0; i < steps.size(); ++i) {
      row(static_cast<int>(i), steps[i].s, steps[i].a.a_lv, steps[i].a.a_bv,
          steps[i].a_av, "NONE");
    }
    row(static_cast<int>(steps.size()), terminal_state, 0.0, 0.0, 0.0,
        to_string(terminal));
    return out;
  }
};

}  // namespace adate
