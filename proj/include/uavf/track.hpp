#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uavf/errors.hpp"
#include "uavf/geo.hpp"
#include "uavf/ulog.hpp"

namespace uavf {

class TrackError : public Error {
 public:
  explicit TrackError(const std::string& what) : Error(what) {}
};

/// Fused pose sample. Velocity is NED (down positive); the quaternion is
/// (w, x, y, z) body-to-world.
struct TrackSample {
  std::uint64_t t_us = 0;
  GeoPoint position;
  std::optional<std::array<double, 3>> local_ned_m;
  std::optional<std::array<double, 3>> velocity_mps;
  std::optional<std::array<double, 4>> attitude_quat;

  bool operator==(const TrackSample&) const = default;
};

struct Trajectory {
  std::vector<TrackSample> samples;  // timestamps strictly increasing
  std::string source_note;           // which log series supplied what
  std::vector<std::string> notes;    // fallbacks, skipped rows, data quality

  bool operator==(const Trajectory&) const = default;
};

/// The flight-summary statistics table.
struct FlightSummary {
  double total_flight_time_s = 0.0;
  double total_distance_m = 0.0;
  double avg_speed_mps = 0.0;
  double max_speed_mps = 0.0;
  double max_up_speed_mps = 0.0;
  double max_down_speed_mps = 0.0;
  std::optional<double> max_tilt_deg;
  std::string os_version = "unknown";
  std::string estimator = "unknown";
  double arming_offset_s = 0.0;
  std::vector<std::string> notes;

  bool operator==(const FlightSummary&) const = default;
};

// ---------------------------------------------------------------------------
// Trajectory construction

namespace track_detail {

struct SeriesView {
  const ulog::TimeSeries* ts = nullptr;
  std::vector<std::size_t> cols;  // resolved column indices

  bool valid() const { return ts != nullptr; }
};

inline SeriesView resolve(const ulog::FlightLog& log, const std::string& name,
                          const std::vector<std::string>& wanted) {
  SeriesView view;
  const ulog::TimeSeries* ts = log.find_series(name, 0);
  if (!ts || ts->rows.empty()) return view;
  std::vector<std::size_t> cols;
  for (const auto& w : wanted) {
    auto idx = ts->column_index(w);
    if (!idx) return view;
    cols.push_back(*idx);
  }
  view.ts = ts;
  view.cols = std::move(cols);
  return view;
}

/// Index of the row whose timestamp is nearest to t, if within window_us.
inline std::optional<std::size_t> nearest_row(const ulog::TimeSeries& ts, std::uint64_t t,
                                              std::uint64_t window_us) {
  if (ts.rows.empty()) return std::nullopt;
  // Timestamps are non-decreasing (parser warns otherwise); binary search.
  std::size_t lo = 0, hi = ts.rows.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (ts.timestamp(mid) < t) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  auto gap = [&](std::size_t i) -> std::uint64_t {
    const std::uint64_t s = ts.timestamp(i);
    return s > t ? s - t : t - s;
  };
  std::optional<std::size_t> best;
  if (lo < ts.rows.size()) best = lo;
  if (lo > 0 && (!best || gap(lo - 1) < gap(*best))) best = lo - 1;
  if (best && gap(*best) <= window_us) return best;
  return std::nullopt;
}

}  // namespace track_detail

/// Nearest-timestamp join window when merging position, velocity and
/// attitude series. Logging rates are 10 Hz or better, so 50 ms pairs
/// samples without bridging real gaps.
inline constexpr std::uint64_t kJoinWindowUs = 50000;

/// Reconstructs the flown path from the parsed log. Prefers the fused
/// estimator output; falls back to raw GPS with a note. Velocity and
/// attitude are joined onto position samples by nearest timestamp.
inline Trajectory build_trajectory(const ulog::FlightLog& log) {
  using namespace track_detail;

  Trajectory traj;

  SeriesView global = resolve(log, "vehicle_global_position", {"lat", "lon", "alt"});
  SeriesView local = resolve(log, "vehicle_local_position",
                             {"x", "y", "z", "ref_lat", "ref_lon", "ref_alt"});
  SeriesView gps = resolve(log, "vehicle_gps_position", {"lat", "lon", "alt"});
  SeriesView local_vel = resolve(log, "vehicle_local_position", {"vx", "vy", "vz"});
  SeriesView gps_vel =
      resolve(log, "vehicle_gps_position", {"vel_n_m_s", "vel_e_m_s", "vel_d_m_s"});
  SeriesView attitude = resolve(log, "vehicle_attitude", {"q[0]", "q[1]", "q[2]", "q[3]"});

  const ulog::TimeSeries* base = nullptr;
  enum class PosKind { global, local, gps } pos_kind = PosKind::global;
  SeriesView pos_view;
  if (global.valid()) {
    base = global.ts;
    pos_view = global;
    pos_kind = PosKind::global;
    traj.source_note = "fused (vehicle_global_position)";
  } else if (local.valid()) {
    base = local.ts;
    pos_view = local;
    pos_kind = PosKind::local;
    traj.source_note = "fused (vehicle_local_position + reference)";
  } else if (gps.valid()) {
    base = gps.ts;
    pos_view = gps;
    pos_kind = PosKind::gps;
    traj.source_note = "gps-fallback (vehicle_gps_position)";
    traj.notes.push_back("no fused position series; raw GPS used (lower accuracy)");
  } else {
    throw TrackError("no position series in log (need vehicle_global_position, "
                     "vehicle_local_position or vehicle_gps_position)");
  }

  const SeriesView* vel_view = nullptr;
  if (local_vel.valid()) {
    vel_view = &local_vel;
  } else if (gps_vel.valid()) {
    vel_view = &gps_vel;
    traj.notes.push_back("velocity from raw GPS series");
  }

  std::uint64_t prev_t = 0;
  std::size_t skipped_nonmonotonic = 0;
  for (std::size_t i = 0; i < base->rows.size(); ++i) {
    const std::uint64_t t = base->timestamp(i);
    if (!traj.samples.empty() && t <= prev_t) {
      ++skipped_nonmonotonic;
      continue;
    }

    TrackSample s;
    s.t_us = t;
    bool pos_ok = true;
    switch (pos_kind) {
      case PosKind::global: {
        const double lat = base->value(i, pos_view.cols[0]);
        const double lon = base->value(i, pos_view.cols[1]);
        const double alt = base->value(i, pos_view.cols[2]);
        pos_ok = std::abs(lat) <= 90.0 && std::abs(lon) <= 180.0;
        if (pos_ok) s.position = GeoPoint{lat, lon, alt};
        break;
      }
      case PosKind::local: {
        const double x = base->value(i, pos_view.cols[0]);
        const double y = base->value(i, pos_view.cols[1]);
        const double z = base->value(i, pos_view.cols[2]);
        const double ref_lat = base->value(i, pos_view.cols[3]);
        const double ref_lon = base->value(i, pos_view.cols[4]);
        const double ref_alt = base->value(i, pos_view.cols[5]);
        pos_ok = std::abs(ref_lat) <= 90.0 && std::abs(ref_lon) <= 180.0;
        if (pos_ok) {
          s.position = offset_ne_m(GeoPoint{ref_lat, ref_lon, ref_alt}, x, y, ref_alt - z);
          s.local_ned_m = {{x, y, z}};
        }
        break;
      }
      case PosKind::gps: {
        const double lat = base->value(i, pos_view.cols[0]) * 1e-7;
        const double lon = base->value(i, pos_view.cols[1]) * 1e-7;
        const double alt = base->value(i, pos_view.cols[2]) * 1e-3;  // mm
        pos_ok = std::abs(lat) <= 90.0 && std::abs(lon) <= 180.0;
        if (pos_ok) s.position = GeoPoint{lat, lon, alt};
        break;
      }
    }
    if (!pos_ok) continue;

    if (pos_kind != PosKind::local && local.valid()) {
      if (auto j = nearest_row(*local.ts, t, kJoinWindowUs)) {
        s.local_ned_m = {{local.ts->value(*j, local.cols[0]),
                          local.ts->value(*j, local.cols[1]),
                          local.ts->value(*j, local.cols[2])}};
      }
    }
    if (vel_view) {
      if (auto j = nearest_row(*vel_view->ts, t, kJoinWindowUs)) {
        s.velocity_mps = {{vel_view->ts->value(*j, vel_view->cols[0]),
                           vel_view->ts->value(*j, vel_view->cols[1]),
                           vel_view->ts->value(*j, vel_view->cols[2])}};
      }
    }
    if (attitude.valid()) {
      if (auto j = nearest_row(*attitude.ts, t, kJoinWindowUs)) {
        std::array<double, 4> q{attitude.ts->value(*j, attitude.cols[0]),
                                attitude.ts->value(*j, attitude.cols[1]),
                                attitude.ts->value(*j, attitude.cols[2]),
                                attitude.ts->value(*j, attitude.cols[3])};
        const double norm = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
        if (std::abs(norm - 1.0) <= 1e-3 && norm > 0.0) {
          for (double& c : q) c /= norm;  // renormalize small drift
          s.attitude_quat = q;
        }
      }
    }

    prev_t = t;
    traj.samples.push_back(std::move(s));
  }

  if (skipped_nonmonotonic > 0) {
    traj.notes.push_back(std::to_string(skipped_nonmonotonic) +
                         " non-monotonic position rows skipped");
  }
  if (traj.samples.empty()) {
    throw TrackError("position series present but no usable samples");
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Statistics

/// 3D segment length between consecutive samples: NED deltas when both
/// carry them, else haversine horizontal plus altitude in quadrature.
inline double segment_length_m(const TrackSample& a, const TrackSample& b) {
  if (a.local_ned_m && b.local_ned_m) {
    const double dn = (*b.local_ned_m)[0] - (*a.local_ned_m)[0];
    const double de = (*b.local_ned_m)[1] - (*a.local_ned_m)[1];
    const double dd = (*b.local_ned_m)[2] - (*a.local_ned_m)[2];
    return std::sqrt(dn * dn + de * de + dd * dd);
  }
  return distance_3d_m(a.position, b.position);
}

inline double total_distance_m(const Trajectory& traj) {
  if (traj.samples.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    total += segment_length_m(traj.samples[i - 1], traj.samples[i]);
  }
  return total;
}

struct SpeedStats {
  double avg_mps = 0.0;
  double max_mps = 0.0;
  double max_up_mps = 0.0;
  double max_down_mps = 0.0;
};

/// Speed statistics from the NED velocity series when present, else from
/// position differencing. Down is positive in NED, so climb rate is -vd.
inline SpeedStats speed_stats(const Trajectory& traj) {
  SpeedStats out;
  const auto& s = traj.samples;
  if (s.size() < 2) return out;

  const double duration_s =
      static_cast<double>(s.back().t_us - s.front().t_us) / 1e6;
  if (duration_s > 0.0) out.avg_mps = total_distance_m(traj) / duration_s;

  bool any_velocity = false;
  for (const auto& sample : s) {
    if (!sample.velocity_mps) continue;
    any_velocity = true;
    const auto& v = *sample.velocity_mps;
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    out.max_mps = std::max(out.max_mps, speed);
    out.max_up_mps = std::max(out.max_up_mps, -v[2]);
    out.max_down_mps = std::max(out.max_down_mps, v[2]);
  }
  if (!any_velocity) {
    // Central differences in the interior, one-sided at the ends.
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::size_t lo = i == 0 ? 0 : i - 1;
      const std::size_t hi = i + 1 == s.size() ? i : i + 1;
      if (lo == hi) continue;
      const double dt = static_cast<double>(s[hi].t_us - s[lo].t_us) / 1e6;
      if (dt <= 0.0) continue;
      const double dist = segment_length_m(s[lo], s[hi]);
      out.max_mps = std::max(out.max_mps, dist / dt);
      double dalt = 0.0;
      if (s[lo].local_ned_m && s[hi].local_ned_m) {
        dalt = (*s[lo].local_ned_m)[2] - (*s[hi].local_ned_m)[2];  // up positive
      } else if (s[lo].position.alt_m && s[hi].position.alt_m) {
        dalt = *s[hi].position.alt_m - *s[lo].position.alt_m;
      }
      out.max_up_mps = std::max(out.max_up_mps, dalt / dt);
      out.max_down_mps = std::max(out.max_down_mps, -dalt / dt);
    }
  }
  out.max_up_mps = std::max(0.0, out.max_up_mps);
  out.max_down_mps = std::max(0.0, out.max_down_mps);
  return out;
}

/// Tilt of one attitude sample: the angle between the body z-axis and the
/// world vertical, arccos(1 - 2(qx^2 + qy^2)) for a unit quaternion.
inline double tilt_deg(const std::array<double, 4>& q) {
  const double c = std::clamp(1.0 - 2.0 * (q[1] * q[1] + q[2] * q[2]), -1.0, 1.0);
  return rad2deg(std::acos(c));
}

/// Maximum tilt over the flight; absent when no attitude was logged.
inline std::optional<double> max_tilt_deg(const Trajectory& traj) {
  std::optional<double> best;
  for (const auto& s : traj.samples) {
    if (!s.attitude_quat) continue;
    const double t = tilt_deg(*s.attitude_quat);
    if (!best || t > *best) best = t;
  }
  return best;
}

namespace track_detail {

/// "NuttX, v11.0.0" from sys_os_name + the packed sys_os_ver_release word
/// (major.minor.patch in the top three bytes).
inline std::string os_version_string(const ulog::FlightLog& log) {
  auto name = log.info_string("sys_os_name");
  auto release = log.info_uint("sys_os_ver_release");
  if (!name && !release) return "unknown";
  std::string out = name ? *name : "unknown";
  if (release) {
    const std::uint32_t v = static_cast<std::uint32_t>(*release);
    char buf[32];
    std::snprintf(buf, sizeof buf, ", v%u.%u.%u", (v >> 24) & 0xFF, (v >> 16) & 0xFF,
                  (v >> 8) & 0xFF);
    out += buf;
  }
  return out;
}

inline std::string estimator_string(const ulog::FlightLog& log) {
  auto group = log.parameters.latest_as_double("SYS_MC_EST_GROUP");
  if (!group) return "unknown";
  if (*group == 2.0) return "EKF2";
  if (*group == 1.0) return "LPE";
  if (*group == 3.0) return "Q attitude";
  return "estimator group " + std::to_string(static_cast<int>(*group));
}

}  // namespace track_detail

/// Assembles the flight-summary table. The arming offset is the first data
/// timestamp on the power-on clock, valid under log-on-arm configurations.
inline FlightSummary flight_summary(const ulog::FlightLog& log, const Trajectory& traj) {
  FlightSummary sum;
  if (!traj.samples.empty()) {
    sum.total_flight_time_s =
        static_cast<double>(traj.samples.back().t_us - traj.samples.front().t_us) / 1e6;
  }
  sum.total_distance_m = total_distance_m(traj);
  const SpeedStats ss = speed_stats(traj);
  sum.avg_speed_mps = ss.avg_mps;
  sum.max_speed_mps = ss.max_mps;
  sum.max_up_speed_mps = ss.max_up_mps;
  sum.max_down_speed_mps = ss.max_down_mps;
  sum.max_tilt_deg = max_tilt_deg(traj);
  sum.os_version = track_detail::os_version_string(log);
  sum.estimator = track_detail::estimator_string(log);

  std::uint64_t first_data = 0;
  bool any = false;
  for (const auto& [key, ts] : log.series) {
    if (ts.rows.empty()) continue;
    const std::uint64_t t = ts.timestamp(0);
    if (!any || t < first_data) first_data = t;
    any = true;
  }
  if (any) {
    sum.arming_offset_s = static_cast<double>(first_data) / 1e6;
    sum.notes.push_back(
        "arming offset inferred from first data timestamp (assumes log-on-arm)");
  }
  if (traj.samples.size() < 2) {
    sum.notes.push_back("degenerate trajectory: fewer than 2 samples");
  }
  for (const auto& note : traj.notes) sum.notes.push_back(note);
  if (!log.dropouts.empty()) {
    sum.notes.push_back(std::to_string(log.dropouts.size()) +
                        " logging dropout(s) recorded; distance spans them");
  }
  if (log.quality.truncated) {
    sum.notes.push_back("log is partial/truncated; statistics cover salvaged data only");
  }
  if (sum.avg_speed_mps > sum.max_speed_mps && sum.max_speed_mps > 0.0) {
    sum.notes.push_back("avg speed exceeds max sampled speed: inconsistent source data");
  }
  return sum;
}

}  // namespace uavf
