#pragma once

// Shared test fixtures: synthetic flight logs, mission plans and media
// built analytically so every expected statistic is known by construction.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "uavf/geo.hpp"
#include "uavf/mission.hpp"
#include "uavf/time.hpp"
#include "uavf/track.hpp"
#include "uavf/ulog.hpp"
#include "uavf/ulog_writer.hpp"

namespace fixtures {

using uavf::GeoPoint;
using namespace uavf::ulog;

// Round to float32 storage precision, so cells survive a write/parse trip.
inline double f32c(double v) { return static_cast<double>(static_cast<float>(v)); }

inline MessageFormat fmt_local_position() {
  return MessageFormat{"vehicle_local_position",
                       {{"uint64_t", FieldType::u64, -1, "timestamp"},
                        {"float", FieldType::f32, -1, "x"},
                        {"float", FieldType::f32, -1, "y"},
                        {"float", FieldType::f32, -1, "z"},
                        {"float", FieldType::f32, -1, "vx"},
                        {"float", FieldType::f32, -1, "vy"},
                        {"float", FieldType::f32, -1, "vz"},
                        {"double", FieldType::f64, -1, "ref_lat"},
                        {"double", FieldType::f64, -1, "ref_lon"},
                        {"float", FieldType::f32, -1, "ref_alt"}}};
}

inline MessageFormat fmt_global_position() {
  return MessageFormat{"vehicle_global_position",
                       {{"uint64_t", FieldType::u64, -1, "timestamp"},
                        {"double", FieldType::f64, -1, "lat"},
                        {"double", FieldType::f64, -1, "lon"},
                        {"float", FieldType::f32, -1, "alt"}}};
}

inline MessageFormat fmt_attitude() {
  return MessageFormat{"vehicle_attitude",
                       {{"uint64_t", FieldType::u64, -1, "timestamp"},
                        {"float", FieldType::f32, 4, "q"}}};
}

inline MessageFormat fmt_gps() {
  return MessageFormat{"vehicle_gps_position",
                       {{"uint64_t", FieldType::u64, -1, "timestamp"},
                        {"uint64_t", FieldType::u64, -1, "time_utc_usec"},
                        {"int32_t", FieldType::i32, -1, "lat"},
                        {"int32_t", FieldType::i32, -1, "lon"},
                        {"int32_t", FieldType::i32, -1, "alt"}}};
}

inline void add_series(FlightLog& log, const MessageFormat& fmt, std::uint8_t multi_id,
                       std::uint16_t msg_id) {
  log.subscriptions.push_back({msg_id, fmt.name, multi_id});
  TimeSeries ts;
  ts.message_name = fmt.name;
  ts.multi_id = multi_id;
  ts.columns = detail::build_decode_plan(fmt, log.formats).columns;
  log.series[{fmt.name, multi_id}] = std::move(ts);
}

inline void iparam(FlightLog& log, const std::string& name, std::int32_t v) {
  log.parameters.entries[name].initial = v;
}
inline void fparam(FlightLog& log, const std::string& name, float v) {
  log.parameters.entries[name].initial = v;
}

// ---------------------------------------------------------------------------
// Flight-summary envelope fixture. Axis-aligned constant-velocity segments
// sampled at 10 Hz, so all statistics are exact by construction:
//   duration 146 s, path 295.1 m, max speed 5.06, climb 2.8, descent 1.25,
//   max tilt 19.8 deg, first sample at t = 481 s.

struct Table4Targets {
  double duration_s = 146.0;
  double distance_m = 295.1;
  double max_speed_mps = 5.06;
  double max_up_mps = 2.8;
  double max_down_mps = 1.25;
  double max_tilt_deg = 19.8;
  double arming_offset_s = 481.0;
  double avg_speed_mps = 295.1 / 146.0;
};

struct Segment {
  double duration_s;
  double vn, ve, vup;  // m/s; exactly one axis nonzero (or none)
  double tilt_deg;
};

inline const std::vector<Segment>& table4_segments() {
  // Durations sum to 146; |v|*duration sums to 295.1.
  static const std::vector<Segment> segs = {
      {5.0, 0, 0, 2.8, 0},       // climb 14 m
      {20.0, 0, 5.06, 0, 19.8},  // sprint east 101.2 m
      {62.9, 2.0, 0, 0, 8.0},    // cruise north 125.8 m
      {5.0, 0, 0, 0, 0},         // hover
      {4.0, 0, 0, -1.25, 0},     // descend 5 m
      {49.1, 0, 1.0, 0, 4.0},    // slow east 49.1 m
  };
  return segs;
}

inline const GeoPoint kFixtureOrigin{26.5192, 80.2330, 126.0};
inline constexpr std::uint64_t kArmingOffsetUs = 481000000;
// UTC instant of log t = 0 (power-on), used by the GPS series.
inline const char* kFixtureEpochUtc = "2023-02-20T10:15:00Z";

inline FlightLog make_table4_flight_log() {
  FlightLog log;
  log.header.version = 1;
  log.header.start_timestamp_us = kArmingOffsetUs;

  log.formats = {fmt_global_position(), fmt_local_position(), fmt_attitude(), fmt_gps()};
  log.info.push_back({"char[3]", "sys_name", std::string("PX4")});
  log.info.push_back({"char[5]", "sys_os_name", std::string("NuttX")});
  log.info.push_back({"uint32_t", "sys_os_ver_release", std::uint64_t{0x0B000000}});

  // Tables 2 and 3: failsafe posture and configuration parameters.
  iparam(log, "COM_ARM_MIS_REQ", 0);
  iparam(log, "COM_ARM_WO_GPS", 1);
  iparam(log, "COM_FLTMODE1", 8);
  iparam(log, "COM_FLTMODE4", 2);
  iparam(log, "COM_FLTMODE6", 3);
  iparam(log, "COM_OBS_AVOID", 0);
  fparam(log, "MIS_LTRMIN_ALT", 10.0f);
  fparam(log, "MPC_LAND_SPEED", 0.7f);
  fparam(log, "MPC_TILTMAX_AIR", 45.0f);
  fparam(log, "MPC_TKO_SPEED", 1.5f);
  fparam(log, "MPC_XY_CRUISE", 5.0f);
  fparam(log, "MPC_Z_VEL_MAX_DN", 1.0f);
  fparam(log, "MPC_Z_VEL_MAX_UP", 3.0f);
  iparam(log, "FD_ESCS_EN", 1);
  iparam(log, "GPS_1_GNSS", 0);
  iparam(log, "GPS_1_PROTOCOL", 1);
  iparam(log, "MAV_TYPE", 2);
  iparam(log, "PWM_AUX_RATE", 50);
  iparam(log, "SDLOG_BOOT_BAT", 0);
  iparam(log, "SDLOG_MODE", 0);
  iparam(log, "SYS_AUTOCONFIG", 0);
  iparam(log, "SYS_MC_EST_GROUP", 2);
  iparam(log, "COM_LOW_BAT_ACT", 1);
  fparam(log, "BAT_LOW_THR", 0.15f);
  iparam(log, "NAV_RCL_ACT", 2);
  fparam(log, "COM_RC_LOSS_T", 2.0f);
  iparam(log, "NAV_DLL_ACT", 0);
  iparam(log, "GF_ACTION", 0);
  fparam(log, "RTL_RETURN_ALT", 30.0f);
  fparam(log, "RTL_DESCEND_ALT", 10.0f);

  add_series(log, fmt_global_position(), 0, 0);
  add_series(log, fmt_local_position(), 0, 1);
  add_series(log, fmt_attitude(), 0, 2);
  add_series(log, fmt_gps(), 0, 3);

  TimeSeries& global = log.series[{"vehicle_global_position", 0}];
  TimeSeries& local = log.series[{"vehicle_local_position", 0}];
  TimeSeries& att = log.series[{"vehicle_attitude", 0}];
  TimeSeries& gps = log.series[{"vehicle_gps_position", 0}];

  const std::int64_t epoch_us = uavf::parse_rfc3339(kFixtureEpochUtc).us_since_epoch;
  const auto& segs = table4_segments();
  const double dt = 0.1;

  // Integer 100 ms steps; every segment duration is a multiple of dt.
  std::vector<int> seg_steps;
  int total_steps = 0;
  for (const auto& s : segs) {
    const int n = static_cast<int>(std::llround(s.duration_s / dt));
    seg_steps.push_back(n);
    total_steps += n;
  }

  double north = 0, east = 0, up = 0;
  std::size_t seg = 0;
  int step_in_seg = 0;
  for (int i = 0; i <= total_steps; ++i) {
    const std::uint64_t ts = kArmingOffsetUs + static_cast<std::uint64_t>(i) * 100000;
    const bool last = i == total_steps;
    const Segment& s = segs[seg];
    const double vn = last ? 0 : s.vn;
    const double ve = last ? 0 : s.ve;
    const double vup = last ? 0 : s.vup;
    const double tilt = last ? 0 : s.tilt_deg;

    const GeoPoint pos = uavf::offset_ne_m(kFixtureOrigin, north, east,
                                           *kFixtureOrigin.alt_m + up);
    global.rows.push_back({ts, pos.lat_deg, pos.lon_deg, f32c(*pos.alt_m)});
    local.rows.push_back({ts, f32c(north), f32c(east), f32c(-up), f32c(vn), f32c(ve),
                          f32c(-vup), kFixtureOrigin.lat_deg, kFixtureOrigin.lon_deg,
                          f32c(*kFixtureOrigin.alt_m)});
    const double half = uavf::deg2rad(tilt) / 2.0;
    att.rows.push_back({ts, f32c(std::cos(half)), 0.0, f32c(std::sin(half)), 0.0});
    if (i % 10 == 0) {
      gps.rows.push_back({ts, static_cast<std::uint64_t>(epoch_us) + ts,
                          static_cast<std::int64_t>(std::llround(pos.lat_deg * 1e7)),
                          static_cast<std::int64_t>(std::llround(pos.lon_deg * 1e7)),
                          static_cast<std::int64_t>(std::llround(*pos.alt_m * 1e3))});
    }
    if (last) break;

    north += vn * dt;
    east += ve * dt;
    up += vup * dt;
    if (++step_in_seg == seg_steps[seg] && seg + 1 < segs.size()) {
      step_in_seg = 0;
      ++seg;
    }
  }

  log.logged_text.push_back({kArmingOffsetUs + 500000, 6, std::nullopt,
                             std::string("[commander] Takeoff detected")});
  return log;
}

// ---------------------------------------------------------------------------
// Mission plan per the recovered-mission narrative: takeoff to 10 m, runway
// leg at 5 m/s, taxiway at 2 m/s, a 180-degree heading hold and 5 s holds
// along the tarmac edge, then return to launch.

inline uavf::MissionPlan make_paper_plan() {
  using uavf::MissionCommand;
  using uavf::MissionFrame;
  using uavf::MissionItem;

  const GeoPoint home{26.5192, 80.2330, 126.0};
  uavf::MissionPlan plan;
  plan.home = home;
  plan.cruise_speed_mps = 5.0;

  auto wp = [&](double north, double east) {
    GeoPoint p = uavf::offset_ne_m(home, north, east);
    p.alt_m = 10.0;  // relative frame
    return p;
  };
  int seq = 0;
  auto add = [&](MissionCommand cmd, int code) {
    MissionItem item;
    item.seq = seq++;
    item.command = cmd;
    item.command_code = code;
    item.frame = MissionFrame::global_relative_alt;
    plan.items.push_back(item);
    return &plan.items.back();
  };

  {  // 0: takeoff to 10 m at home
    auto* item = add(MissionCommand::takeoff, 22);
    GeoPoint p = home;
    p.alt_m = 10.0;
    item->coordinate = p;
  }
  {  // 1: runway speed 5 m/s
    auto* item = add(MissionCommand::change_speed, 178);
    item->speed_mps = 5.0;
  }
  {  // 2: runway end
    auto* item = add(MissionCommand::waypoint, 16);
    item->coordinate = wp(0, 250);
  }
  {  // 3: taxiway speed 2 m/s
    auto* item = add(MissionCommand::change_speed, 178);
    item->speed_mps = 2.0;
  }
  {  // 4: taxiway entry
    auto* item = add(MissionCommand::waypoint, 16);
    item->coordinate = wp(40, 250);
  }
  {  // 5: taxiway end
    auto* item = add(MissionCommand::waypoint, 16);
    item->coordinate = wp(40, 150);
  }
  {  // 6: sustain heading 180
    auto* item = add(MissionCommand::condition_yaw, 115);
    item->yaw_deg = 180.0;
  }
  // 7..11: tarmac-edge photo points, hold 5 s each
  const double east_positions[] = {150, 120, 90, 60, 30};
  for (double e : east_positions) {
    auto* item = add(MissionCommand::waypoint, 16);
    item->coordinate = wp(60, e);
    item->hold_s = 5.0;
    item->yaw_deg = 180.0;
  }
  add(MissionCommand::return_to_launch, 20);
  return plan;
}

/// Walks the plan's spatial items at 10 Hz and stops stop_short_m before
/// the waypoint with sequence number stop_before_seq (the interception).
inline uavf::Trajectory make_plan_trajectory(const uavf::MissionPlan& plan,
                                             int stop_before_seq = -1,
                                             double stop_short_m = 25.0) {
  uavf::Trajectory traj;
  traj.source_note = "synthetic (plan-following)";

  const GeoPoint home = *plan.home;
  const double ground = home.alt_m ? *home.alt_m : 0.0;

  double north = 0, east = 0, up = 0;
  double speed = 5.0;
  std::uint64_t t_us = kArmingOffsetUs;
  const double dt = 0.1;

  auto emit = [&]() {
    uavf::TrackSample s;
    s.t_us = t_us;
    s.position = uavf::offset_ne_m(home, north, east, ground + up);
    s.local_ned_m = {{north, east, -up}};
    traj.samples.push_back(s);
    t_us += 100000;
  };
  auto ne_of = [&](const GeoPoint& p) {
    const double dn = uavf::deg2rad(p.lat_deg - home.lat_deg) * uavf::kEarthRadiusM;
    const double de = uavf::deg2rad(p.lon_deg - home.lon_deg) * uavf::kEarthRadiusM *
                      std::cos(uavf::deg2rad(home.lat_deg));
    return std::array<double, 2>{dn, de};
  };

  emit();  // on the ground at home
  for (const auto& item : plan.items) {
    if (item.command == uavf::MissionCommand::change_speed) {
      speed = *item.speed_mps;
      continue;
    }
    if (item.command == uavf::MissionCommand::takeoff) {
      const double climb = 1.5;
      const double target = item.coordinate->alt_m ? *item.coordinate->alt_m : 10.0;
      while (up + climb * dt < target) {
        up += climb * dt;
        emit();
      }
      up = target;
      emit();
      continue;
    }
    if (item.command != uavf::MissionCommand::waypoint &&
        item.command != uavf::MissionCommand::loiter_time) {
      continue;
    }
    const auto target = ne_of(*item.coordinate);
    const bool intercepted = item.seq == stop_before_seq;
    for (;;) {
      const double dn = target[0] - north;
      const double de = target[1] - east;
      const double dist = std::hypot(dn, de);
      if (intercepted && dist <= stop_short_m) return traj;  // captured here
      if (dist < speed * dt) {
        north = target[0];
        east = target[1];
        emit();
        break;
      }
      north += speed * dt * dn / dist;
      east += speed * dt * de / dist;
      emit();
    }
    if (item.hold_s) {
      const int hold_samples = static_cast<int>(*item.hold_s / dt);
      for (int i = 0; i < hold_samples; ++i) emit();
    }
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Random valid logs for the round-trip property.

inline FlightLog make_random_log(std::mt19937_64& rng) {
  FlightLog log;
  auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto real = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  log.header.version = 1;
  log.header.start_timestamp_us = static_cast<std::uint64_t>(pick(0, 1 << 20));

  const struct {
    const char* name;
    FieldType type;
  } scalar_types[] = {
      {"int8_t", FieldType::i8},   {"uint8_t", FieldType::u8},
      {"int16_t", FieldType::i16}, {"uint16_t", FieldType::u16},
      {"int32_t", FieldType::i32}, {"uint32_t", FieldType::u32},
      {"int64_t", FieldType::i64}, {"uint64_t", FieldType::u64},
      {"float", FieldType::f32},   {"double", FieldType::f64},
      {"bool", FieldType::boolean},
  };

  const int n_formats = pick(1, 3);
  for (int f = 0; f < n_formats; ++f) {
    MessageFormat fmt;
    fmt.name = "msg_" + std::to_string(f);
    fmt.fields.push_back({"uint64_t", FieldType::u64, -1, "timestamp"});
    const int n_fields = pick(0, 5);
    for (int i = 0; i < n_fields; ++i) {
      const int kind = pick(0, 12);
      Field field;
      field.name = "f" + std::to_string(i);
      if (kind < 11) {
        field.type_name = scalar_types[kind].name;
        field.type = scalar_types[kind].type;
        field.array_len = pick(0, 3) == 0 ? pick(2, 4) : -1;
      } else if (kind == 11) {
        field.type_name = "char";
        field.type = FieldType::chr;
        field.array_len = pick(1, 8);
      } else {
        field.type_name = "bool";
        field.type = FieldType::boolean;
        field.array_len = -1;
      }
      fmt.fields.push_back(std::move(field));
    }
    log.formats.push_back(std::move(fmt));
  }

  const int n_info = pick(0, 3);
  for (int i = 0; i < n_info; ++i) {
    if (pick(0, 1) == 0) {
      std::string value;
      const int len = pick(1, 12);
      for (int c = 0; c < len; ++c) value.push_back(static_cast<char>('a' + pick(0, 25)));
      log.info.push_back({"char[" + std::to_string(len) + "]", "info_" + std::to_string(i),
                          value});
    } else {
      log.info.push_back({"uint32_t", "info_" + std::to_string(i),
                          static_cast<std::uint64_t>(pick(0, 1 << 30))});
    }
  }

  const int n_params = pick(0, 5);
  for (int i = 0; i < n_params; ++i) {
    const std::string name = "PARAM_" + std::to_string(i);
    ParamEntry entry;
    if (pick(0, 1) == 0) {
      entry.initial = static_cast<std::int32_t>(pick(-1000, 1000));
    } else {
      entry.initial = static_cast<float>(real(-100, 100));
    }
    if (pick(0, 3) == 0) entry.changed = static_cast<float>(real(-100, 100));
    if (pick(0, 3) == 0) {
      entry.sys_default = {std::uint8_t(pick(1, 3)),
                           static_cast<std::int32_t>(pick(-10, 10))};
    }
    log.parameters.entries[name] = entry;
  }

  std::uint16_t next_msg_id = 0;
  for (const auto& fmt : log.formats) {
    const int instances = pick(0, 4) == 0 ? 2 : 1;
    for (int inst = 0; inst < instances; ++inst) {
      const std::uint8_t multi_id = static_cast<std::uint8_t>(inst);
      log.subscriptions.push_back({next_msg_id, fmt.name, multi_id});
      TimeSeries ts;
      ts.message_name = fmt.name;
      ts.multi_id = multi_id;
      ts.columns = detail::build_decode_plan(fmt, log.formats).columns;
      std::uint64_t t = static_cast<std::uint64_t>(pick(0, 1000));
      const int n_rows = pick(0, 20);
      for (int r = 0; r < n_rows; ++r) {
        std::vector<CellValue> row;
        for (const auto& col : ts.columns) {
          switch (col.type) {
            case FieldType::u64:
              row.emplace_back(&col == &ts.columns[0]
                                   ? t
                                   : static_cast<std::uint64_t>(pick(0, 1 << 30)));
              break;
            case FieldType::i8: row.emplace_back(static_cast<std::int64_t>(pick(-128, 127))); break;
            case FieldType::u8: row.emplace_back(static_cast<std::uint64_t>(pick(0, 255))); break;
            case FieldType::i16: row.emplace_back(static_cast<std::int64_t>(pick(-30000, 30000))); break;
            case FieldType::u16: row.emplace_back(static_cast<std::uint64_t>(pick(0, 65535))); break;
            case FieldType::i32: row.emplace_back(static_cast<std::int64_t>(pick(-1000000, 1000000))); break;
            case FieldType::u32: row.emplace_back(static_cast<std::uint64_t>(pick(0, 1 << 30))); break;
            case FieldType::i64: row.emplace_back(static_cast<std::int64_t>(pick(-1000000, 1000000)) * 4096); break;
            case FieldType::f32: row.emplace_back(f32c(real(-1e6, 1e6))); break;
            case FieldType::f64: row.emplace_back(real(-1e6, 1e6)); break;
            case FieldType::boolean: row.emplace_back(static_cast<std::uint64_t>(pick(0, 1))); break;
            case FieldType::chr: {
              // Length is fixed by the format; pad-free random letters.
              int len = 1;
              for (const auto& fld : fmt.fields) {
                if (fld.name == col.name && fld.type == FieldType::chr) {
                  len = fld.array_len < 0 ? 1 : fld.array_len;
                }
              }
              std::string s;
              const int used = pick(0, len);
              for (int c = 0; c < used; ++c) s.push_back(static_cast<char>('a' + pick(0, 25)));
              row.emplace_back(std::move(s));
              break;
            }
            case FieldType::nested: break;
          }
        }
        ts.rows.push_back(std::move(row));
        t += static_cast<std::uint64_t>(pick(0, 5000));
      }
      log.series[{fmt.name, multi_id}] = std::move(ts);
      ++next_msg_id;
    }
  }

  // Logged text, timestamp-ordered.
  std::uint64_t text_t = 0;
  const int n_text = pick(0, 3);
  for (int i = 0; i < n_text; ++i) {
    text_t += static_cast<std::uint64_t>(pick(0, 100000));
    LoggedMessage lm;
    lm.timestamp_us = text_t;
    lm.level = static_cast<std::uint8_t>(pick(0, 7));
    if (pick(0, 2) == 0) lm.tag = static_cast<std::uint16_t>(pick(0, 100));
    lm.text = "note " + std::to_string(i);
    log.logged_text.push_back(std::move(lm));
  }

  // Dropouts at existing data timestamps (the format stores no dropout
  // time, so placement must coincide with a record).
  std::vector<std::uint64_t> all_ts;
  for (const auto& [key, ts] : log.series) {
    for (std::size_t r = 0; r < ts.rows.size(); ++r) all_ts.push_back(ts.timestamp(r));
  }
  std::sort(all_ts.begin(), all_ts.end());
  if (!all_ts.empty() && pick(0, 1) == 0) {
    const int n_drops = pick(1, 2);
    std::vector<std::uint64_t> chosen;
    for (int i = 0; i < n_drops; ++i) {
      chosen.push_back(all_ts[static_cast<std::size_t>(pick(0, int(all_ts.size()) - 1))]);
    }
    std::sort(chosen.begin(), chosen.end());
    for (auto t : chosen) {
      log.dropouts.push_back({t, static_cast<std::uint16_t>(pick(1, 2000))});
    }
  }
  return log;
}

// ---------------------------------------------------------------------------
// Minimal JPEG with an EXIF DateTimeOriginal, for media-ingest tests.

inline std::vector<std::uint8_t> make_jpeg_with_exif(const std::string& exif_datetime) {
  std::vector<std::uint8_t> tiff;
  auto w16 = [&tiff](std::uint16_t v) {
    tiff.push_back(static_cast<std::uint8_t>(v & 0xFF));
    tiff.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto w32 = [&tiff](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) tiff.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  // TIFF header (little endian), IFD0 at offset 8.
  tiff.push_back('I');
  tiff.push_back('I');
  w16(42);
  w32(8);
  // IFD0: one entry (ExifIFD pointer), next IFD 0. Entry ends at 8+2+12+4=26.
  w16(1);
  w16(0x8769);
  w16(4);  // LONG
  w32(1);
  w32(26);  // Exif IFD offset
  w32(0);   // next IFD
  // Exif IFD at 26: one entry (DateTimeOriginal), value at 26+2+12+4 = 44.
  w16(1);
  w16(0x9003);
  w16(2);  // ASCII
  w32(20);
  w32(44);
  w32(0);
  std::string dt = exif_datetime;  // "YYYY:MM:DD HH:MM:SS"
  dt.resize(19);
  for (char c : dt) tiff.push_back(static_cast<std::uint8_t>(c));
  tiff.push_back(0);

  std::vector<std::uint8_t> jpeg = {0xFF, 0xD8};  // SOI
  const std::size_t app1_len = 2 + 6 + tiff.size();
  jpeg.push_back(0xFF);
  jpeg.push_back(0xE1);
  jpeg.push_back(static_cast<std::uint8_t>(app1_len >> 8));
  jpeg.push_back(static_cast<std::uint8_t>(app1_len & 0xFF));
  const char* exif_tag = "Exif\0\0";
  jpeg.insert(jpeg.end(), exif_tag, exif_tag + 6);
  jpeg.insert(jpeg.end(), tiff.begin(), tiff.end());
  jpeg.push_back(0xFF);
  jpeg.push_back(0xD9);  // EOI
  return jpeg;
}

}  // namespace fixtures
