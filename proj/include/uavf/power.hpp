#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "uavf/errors.hpp"

namespace uavf {

/// Battery as recovered: pack geometry plus the linear discharge model
/// endpoints. empty_voltage_v is the voltage at which the linear
/// voltage-vs-capacity model reads zero remaining capacity.
struct BatterySpec {
  int cell_count = 1;
  double capacity_mah = 0.0;
  double full_voltage_v = 0.0;
  double empty_voltage_v = 0.0;

  bool operator==(const BatterySpec&) const = default;
};

/// Default zero-capacity voltage for a 4s pack, back-solved from the
/// calibration point (16.2 V observed, 5300 mAh remaining, 6500 mAh full,
/// 16.8 V full): 6500(16.2 - V0) = 5300(16.8 - V0) gives V0 = 13.55 V.
inline constexpr double kDefaultEmptyVoltage4s = 13.55;

inline BatterySpec make_battery_spec(int cell_count, double capacity_mah,
                                     double full_voltage_v, double empty_voltage_v) {
  if (cell_count < 1) throw ValidationError("battery cell_count must be >= 1");
  if (!(capacity_mah > 0.0)) throw ValidationError("battery capacity_mah must be > 0");
  if (!(full_voltage_v > 0.0)) throw ValidationError("battery full_voltage_v must be > 0");
  if (empty_voltage_v < 0.0) throw ValidationError("battery empty_voltage_v must be >= 0");
  if (!(empty_voltage_v < full_voltage_v)) {
    throw ValidationError("battery empty_voltage_v must be below full_voltage_v");
  }
  return BatterySpec{cell_count, capacity_mah, full_voltage_v, empty_voltage_v};
}

/// Voltage read off the pack at recovery time. A reading above the pack's
/// full-charge voltage is forensically implausible and rejected.
struct BatteryObservation {
  double observed_voltage_v = 0.0;

  bool operator==(const BatteryObservation&) const = default;
};

inline BatteryObservation make_battery_observation(double observed_voltage_v,
                                                   const BatterySpec& spec) {
  if (!(observed_voltage_v > 0.0)) {
    throw ValidationError("observed battery voltage must be > 0");
  }
  if (observed_voltage_v > spec.full_voltage_v) {
    throw ValidationError("observed battery voltage exceeds full-charge voltage");
  }
  return BatteryObservation{observed_voltage_v};
}

/// Cruise power budget. Per-motor wattage comes from thrust-bench data
/// supplied by the investigator; avionics covers telemetry and other
/// always-on consumers.
struct PowerModel {
  double per_motor_cruise_w = 0.0;
  int motor_count = 1;
  double avionics_w = 0.0;
  double cruise_speed_mps = 0.0;

  double total_power_w() const { return per_motor_cruise_w * motor_count + avionics_w; }

  bool operator==(const PowerModel&) const = default;
};

inline PowerModel make_power_model(double per_motor_cruise_w, int motor_count,
                                   double avionics_w, double cruise_speed_mps) {
  if (!(per_motor_cruise_w > 0.0)) throw ValidationError("per_motor_cruise_w must be > 0");
  if (motor_count < 1) throw ValidationError("motor_count must be >= 1");
  if (avionics_w < 0.0) throw ValidationError("avionics_w must be >= 0");
  if (!(cruise_speed_mps > 0.0)) throw ValidationError("cruise_speed_mps must be > 0");
  return PowerModel{per_motor_cruise_w, motor_count, avionics_w, cruise_speed_mps};
}

/// Energy bookkeeping and the endurance/range outputs.
struct RangeEstimate {
  double e_total_wh = 0.0;
  double e_remaining_wh = 0.0;
  double e_used_wh = 0.0;
  double t_flight_s = 0.0;
  double r_max_m = 0.0;
  double v_avg_mps = 0.0;
  std::vector<std::string> assumptions;

  bool operator==(const RangeEstimate&) const = default;
};

/// Energy in a pack at the given voltage and capacity: V * mAh / 1000 [Wh].
inline double total_energy_wh(double voltage_v, double capacity_mah) {
  if (!(voltage_v > 0.0)) throw ValidationError("total_energy: voltage must be > 0");
  if (!(capacity_mah > 0.0)) throw ValidationError("total_energy: capacity must be > 0");
  return voltage_v * capacity_mah / 1000.0;
}

/// Remaining capacity under the linear voltage-capacity model:
///   capacity * (observed - empty) / (full - empty).
/// A reading at or below the empty voltage estimates 0 mAh (depleted pack).
inline double remaining_capacity_mah(const BatterySpec& spec, const BatteryObservation& obs) {
  if (obs.observed_voltage_v <= spec.empty_voltage_v) return 0.0;
  return spec.capacity_mah * (obs.observed_voltage_v - spec.empty_voltage_v) /
         (spec.full_voltage_v - spec.empty_voltage_v);
}

/// E_used = E_total - E_remaining, clamped to be non-negative.
inline double energy_used_wh(const BatterySpec& spec, const BatteryObservation& obs) {
  const double e_total = total_energy_wh(spec.full_voltage_v, spec.capacity_mah);
  const double rem_mah = remaining_capacity_mah(spec, obs);
  const double e_remaining =
      rem_mah > 0.0 ? total_energy_wh(obs.observed_voltage_v, rem_mah) : 0.0;
  return std::max(0.0, e_total - e_remaining);
}

/// Flight duration from consumed energy: E_used * 3600 / P_total [s].
inline double flight_time_s(double e_used_wh, const PowerModel& model) {
  const double p = model.total_power_w();
  if (!(p > 0.0)) throw ValidationError("flight_time: total power must be > 0");
  if (e_used_wh < 0.0) throw ValidationError("flight_time: energy used must be >= 0");
  return e_used_wh * 3600.0 / p;
}

/// Maximum straight-line range: T_flight * V_avg [m].
inline double max_range_m(double t_flight_s, double v_avg_mps) {
  if (t_flight_s < 0.0 || v_avg_mps < 0.0) {
    throw ValidationError("max_range: inputs must be >= 0");
  }
  return t_flight_s * v_avg_mps;
}

/// Composes the full battery-based estimate. The assumptions list always
/// carries the ideal-conditions caveat; real endurance is lower under wind,
/// temperature, component wear and other losses.
inline RangeEstimate estimate_range(const BatterySpec& spec, const BatteryObservation& obs,
                                    const PowerModel& model) {
  RangeEstimate est;
  est.e_total_wh = total_energy_wh(spec.full_voltage_v, spec.capacity_mah);
  const double rem_mah = remaining_capacity_mah(spec, obs);
  est.e_remaining_wh = rem_mah > 0.0 ? total_energy_wh(obs.observed_voltage_v, rem_mah) : 0.0;
  est.e_used_wh = std::max(0.0, est.e_total_wh - est.e_remaining_wh);
  est.t_flight_s = flight_time_s(est.e_used_wh, model);
  est.v_avg_mps = model.cruise_speed_mps;
  est.r_max_m = max_range_m(est.t_flight_s, est.v_avg_mps);

  est.assumptions.push_back(
      "Ideal-conditions estimate: wind, temperature, component wear and other "
      "losses reduce real endurance and range.");
  est.assumptions.push_back(
      "Linear voltage-to-capacity discharge model with zero-capacity voltage " +
      std::to_string(spec.empty_voltage_v) + " V.");
  if (rem_mah <= 0.0) {
    est.assumptions.push_back(
        "Observed voltage at or below the model's empty voltage: pack treated as depleted.");
  }
  if (est.e_used_wh == 0.0) {
    est.assumptions.push_back(
        "No energy use observed (pack at full charge): estimate implies no flight.");
  }
  return est;
}

}  // namespace uavf
