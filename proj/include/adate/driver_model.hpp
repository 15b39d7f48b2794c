#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace adate {

// Gap substituted when a caller passes a non-positive finite gap; keeps the
// IDM interaction term finite.
inline constexpr double kEpsGap = 0.1;

enum class ModelKind : int { kIdm = 0, kFvdm = 1, kScripted = 2 };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kIdm:
      return "idm";
    case ModelKind::kFvdm:
      return "fvdm";
    case ModelKind::kScripted:
      return "scripted";
  }
  return "idm";
}

// Car-following model parameters. Only the block matching `kind` is read.
// Free driving is expressed by gap = +inf with v_lead = v_self.
struct DriverModelParams {
  ModelKind kind = ModelKind::kIdm;

  // IDM: a = accel * [1 - (v/v0)^delta - (s*/gap)^2],
  // s* = s0 + v*Th + v*(v - v_lead)/(2*sqrt(accel*decel)).
  double idm_v0 = 33.3;
  double idm_th = 1.5;
  double idm_s0 = 2.0;
  double idm_delta = 4.0;
  double idm_accel = 2.0;
  double idm_decel = 2.0;

  // FVDM: a = kappa * (V_opt(gap) - v) + lambda * (v_lead - v),
  // V_opt(gap) = v0/2 * [tanh(gap/b - c) + tanh(c)].
  double fvdm_kappa = 0.41;
  double fvdm_lambda = 0.5;
  double fvdm_v0 = 33.3;
  double fvdm_b = 6.75;
  double fvdm_c = 1.57;

  // Scripted: brake hard when close, otherwise accelerate toward v_target.
  double scripted_gap_brake = 10.0;
  double scripted_brake = -2.0;
  double scripted_v_target = 25.0;
  double scripted_cruise = 1.0;

  // Output clamp, applied to every model.
  double a_min = -6.0;
  double a_max = 2.0;

  void validate() const {
    if (!(a_min < 0.0 && 0.0 < a_max)) {
      throw std::invalid_argument("driver model: need a_min < 0 < a_max");
    }
    if (kind == ModelKind::kIdm) {
      if (!(idm_v0 > 0 && idm_th > 0 && idm_s0 > 0 && idm_delta > 0 &&
            idm_accel > 0 && idm_decel > 0)) {
        throw std::invalid_argument("driver model: IDM parameters must be > 0");
      }
    } else if (kind == ModelKind::kFvdm) {
      if (!(fvdm_kappa > 0 && fvdm_lambda > 0 && fvdm_v0 > 0 && fvdm_b > 0)) {
        throw std::invalid_argument("driver model: FVDM parameters must be > 0");
      }
    } else {
      if (!(scripted_gap_brake > 0 && scripted_v_target >= 0)) {
        throw std::invalid_argument("driver model: scripted parameters invalid");
      }
    }
  }
};

inline DriverModelParams idm_params() { return DriverModelParams{}; }

inline DriverModelParams fvdm_params(double a_min) {
  DriverModelParams p;
  p.kind = ModelKind::kFvdm;
  p.a_min = a_min;
  return p;
}

inline DriverModelParams scripted_params() {
  DriverModelParams p;
  p.kind = ModelKind::kScripted;
  return p;
}

inline double fvdm_v_opt(const DriverModelParams& p, double gap) {
  return 0.5 * p.fvdm_v0 * (std::tanh(gap / p.fvdm_b - p.fvdm_c) +
                            std::tanh(p.fvdm_c));
}

// Commanded acceleration for a vehicle at speed v_self following a leader at
// speed v_lead across `gap` meters. gap = +inf means free driving.
inline double model_accel(const DriverModelParams& p, double gap, double v_self,
                          double v_lead) {
  if (!(gap > 0.0)) gap = kEpsGap;
  double a = 0.0;
  switch (p.kind) {
    case ModelKind::kIdm: {
      const double dv = v_self - v_lead;
      const double s_star =
          p.idm_s0 + v_self * p.idm_th +
          v_self * dv / (2.0 * std::sqrt(p.idm_accel * p.idm_decel));
      const double ratio = s_star / gap;
      a = p.idm_accel * (1.0 - std::pow(v_self / p.idm_v0, p.idm_delta) -
                         ratio * ratio);
      break;
    }
    case ModelKind::kFvdm: {
      a = p.fvdm_kappa * (fvdm_v_opt(p, gap) - v_self) +
          p.fvdm_lambda * (v_lead - v_self);
      break;
    }
    case ModelKind::kScripted: {
      if (gap < p.scripted_gap_brake) {
        a = p.scripted_brake;
      } else if (v_self < p.scripted_v_target) {
        a = p.scripted_cruise;
      } else {
        a = 0.0;
      }
      break;
    }
  }
  return std::clamp(a, p.a_min, p.a_max);
}

}  // namespace adate
