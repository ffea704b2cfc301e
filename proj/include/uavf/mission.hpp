#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavf/errors.hpp"
#include "uavf/geo.hpp"
#include "uavf/track.hpp"

namespace uavf {

class ComparisonError : public Error {
 public:
  explicit ComparisonError(const std::string& what) : Error(what) {}
};

// MAVLink mission command numbers this toolkit decodes by name. Anything
// else is preserved as other(code) with its raw parameter row.
enum class MissionCommand {
  takeoff,           // 22
  waypoint,          // 16
  change_speed,      // 178
  condition_yaw,     // 115
  loiter_time,       // 19
  return_to_launch,  // 20
  land,              // 21
  other,
};

inline const char* to_string(MissionCommand c) {
  switch (c) {
    case MissionCommand::takeoff: return "takeoff";
    case MissionCommand::waypoint: return "waypoint";
    case MissionCommand::change_speed: return "change_speed";
    case MissionCommand::condition_yaw: return "condition_yaw";
    case MissionCommand::loiter_time: return "loiter_time";
    case MissionCommand::return_to_launch: return "return_to_launch";
    case MissionCommand::land: return "land";
    case MissionCommand::other: return "other";
  }
  return "other";
}

enum class MissionFrame { global_relative_alt, global_amsl, local };

inline const char* to_string(MissionFrame f) {
  switch (f) {
    case MissionFrame::global_relative_alt: return "global_relative_alt";
    case MissionFrame::global_amsl: return "global_amsl";
    case MissionFrame::local: return "local";
  }
  return "global_relative_alt";
}

struct MissionItem {
  int seq = 0;
  MissionCommand command = MissionCommand::other;
  int command_code = 0;  // MAVLink number, kept for unknowns and rendering
  std::optional<GeoPoint> coordinate;
  std::optional<double> hold_s;
  std::optional<double> speed_mps;
  std::optional<double> yaw_deg;  // [0, 360)
  MissionFrame frame = MissionFrame::global_relative_alt;
  // Raw parameter row, only retained for other(code) items so no evidence
  // is dropped on re-render.
  std::array<std::optional<double>, 7> other_params{};

  bool operator==(const MissionItem&) const = default;

  bool carries_coordinate() const { return coordinate.has_value(); }
};

struct MissionPlan {
  std::optional<GeoPoint> home;
  std::vector<MissionItem> items;  // seq strictly increasing from 0
  std::optional<double> cruise_speed_mps;

  bool operator==(const MissionPlan&) const = default;
};

// ---------------------------------------------------------------------------
// .plan decoding (QGC plan interchange: JSON with MAVLink command numbers)

namespace mission_detail {

inline std::optional<double> param_at(const nlohmann::json& params, std::size_t i) {
  if (i >= params.size()) return std::nullopt;
  const auto& v = params[i];
  if (v.is_null()) return std::nullopt;
  if (!v.is_number()) return std::nullopt;
  const double d = v.get<double>();
  if (std::isnan(d)) return std::nullopt;
  return d;
}

inline MissionFrame frame_from_code(int code) {
  switch (code) {
    case 0:
    case 5: return MissionFrame::global_amsl;
    case 1:
    case 4:
    case 7: return MissionFrame::local;
    default: return MissionFrame::global_relative_alt;  // 3 and 6, QGC default
  }
}

inline int frame_to_code(MissionFrame f) {
  switch (f) {
    case MissionFrame::global_amsl: return 0;
    case MissionFrame::local: return 1;
    case MissionFrame::global_relative_alt: return 3;
  }
  return 3;
}

inline double normalize_yaw(double yaw) {
  double y = std::fmod(yaw, 360.0);
  if (y < 0) y += 360.0;
  return y;
}

}  // namespace mission_detail

/// Decodes a QGC-style .plan document. Unknown command numbers survive as
/// other(code); structural violations throw DocumentError with the field
/// path that failed.
inline MissionPlan parse_plan(const std::string& text) {
  using mission_detail::param_at;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("plan is not valid JSON: ") + e.what(), "$");
  }

  MissionPlan plan;
  if (!doc.is_object() || !doc.contains("mission")) {
    throw DocumentError("plan document lacks a mission object", "mission");
  }
  const auto& mission = doc["mission"];

  if (mission.contains("plannedHomePosition") && mission["plannedHomePosition"].is_array()) {
    const auto& hp = mission["plannedHomePosition"];
    if (hp.size() >= 2 && hp[0].is_number() && hp[1].is_number()) {
      std::optional<double> alt;
      if (hp.size() >= 3 && hp[2].is_number()) alt = hp[2].get<double>();
      try {
        plan.home = make_geopoint(hp[0].get<double>(), hp[1].get<double>(), alt);
      } catch (const ValidationError& e) {
        throw DocumentError(e.what(), "mission.plannedHomePosition");
      }
    }
  }
  if (mission.contains("cruiseSpeed") && mission["cruiseSpeed"].is_number()) {
    const double v = mission["cruiseSpeed"].get<double>();
    if (v > 0) plan.cruise_speed_mps = v;
  }

  if (!mission.contains("items") || !mission["items"].is_array()) {
    throw DocumentError("mission has no items array", "mission.items");
  }

  int seq = 0;
  for (const auto& ij : mission["items"]) {
    const std::string path = "mission.items[" + std::to_string(seq) + "]";
    if (!ij.is_object()) throw DocumentError("mission item is not an object", path);
    if (ij.value("type", "SimpleItem") == "ComplexItem") {
      throw DocumentError("ComplexItem entries are not supported; export a simple-item plan",
                          path);
    }
    if (!ij.contains("command") || !ij["command"].is_number_integer()) {
      throw DocumentError("mission item lacks a command number", path + ".command");
    }
    const int code = ij["command"].get<int>();
    const nlohmann::json params =
        ij.contains("params") && ij["params"].is_array() ? ij["params"] : nlohmann::json::array();

    MissionItem item;
    item.seq = seq;
    item.command_code = code;
    item.frame = mission_detail::frame_from_code(ij.value("frame", 3));

    auto lat = param_at(params, 4);
    auto lon = param_at(params, 5);
    auto alt = param_at(params, 6);
    auto coordinate = [&]() -> std::optional<GeoPoint> {
      if (!lat || !lon) return std::nullopt;
      try {
        return make_geopoint(*lat, *lon, alt);
      } catch (const ValidationError& e) {
        throw DocumentError(e.what(), path + ".params");
      }
    };

    switch (code) {
      case 22: {  // NAV_TAKEOFF
        item.command = MissionCommand::takeoff;
        item.coordinate = coordinate();
        if (!item.coordinate) {
          // QGC writes null lat/lon for "take off from here"; anchor at home.
          if (!plan.home) {
            throw DocumentError("takeoff has no coordinate and plan has no home position",
                                path + ".params");
          }
          item.coordinate = GeoPoint{plan.home->lat_deg, plan.home->lon_deg, alt};
        }
        break;
      }
      case 16: {  // NAV_WAYPOINT
        item.command = MissionCommand::waypoint;
        item.coordinate = coordinate();
        if (!item.coordinate) {
          throw DocumentError("waypoint lacks a coordinate", path + ".params");
        }
        if (auto hold = param_at(params, 0); hold && *hold > 0) item.hold_s = hold;
        if (auto yaw = param_at(params, 3)) item.yaw_deg = mission_detail::normalize_yaw(*yaw);
        break;
      }
      case 178: {  // DO_CHANGE_SPEED
        item.command = MissionCommand::change_speed;
        auto speed = param_at(params, 1);
        if (!speed || *speed <= 0) {
          throw DocumentError("change_speed requires a positive speed", path + ".params[1]");
        }
        item.speed_mps = speed;
        break;
      }
      case 115: {  // CONDITION_YAW
        item.command = MissionCommand::condition_yaw;
        auto yaw = param_at(params, 0);
        if (!yaw) throw DocumentError("condition_yaw lacks an angle", path + ".params[0]");
        item.yaw_deg = mission_detail::normalize_yaw(*yaw);
        break;
      }
      case 19: {  // NAV_LOITER_TIME
        item.command = MissionCommand::loiter_time;
        auto hold = param_at(params, 0);
        if (!hold || *hold < 0) {
          throw DocumentError("loiter_time requires a non-negative hold", path + ".params[0]");
        }
        item.hold_s = hold;
        item.coordinate = coordinate();
        break;
      }
      case 20: item.command = MissionCommand::return_to_launch; break;
      case 21: {  // NAV_LAND
        item.command = MissionCommand::land;
        item.coordinate = coordinate();
        break;
      }
      default: {
        item.command = MissionCommand::other;
        for (std::size_t i = 0; i < 7; ++i) item.other_params[i] = param_at(params, i);
        item.coordinate = coordinate();
        break;
      }
    }
    plan.items.push_back(std::move(item));
    ++seq;
  }
  return plan;
}

inline MissionPlan parse_plan_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open mission plan", path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_plan(text);
}

/// Renders back to a .plan document (canonical item parameters; used by
/// fixtures and tests — the ingested original file remains the evidence).
inline std::string render_plan(const MissionPlan& plan) {
  using nlohmann::ordered_json;
  ordered_json items = ordered_json::array();
  for (const auto& item : plan.items) {
    ordered_json params = ordered_json::array();
    auto push = [&params](std::optional<double> v) {
      if (v) {
        params.push_back(*v);
      } else {
        params.push_back(nullptr);
      }
    };
    switch (item.command) {
      case MissionCommand::takeoff:
      case MissionCommand::land:
        push(0.0); push(0.0); push(0.0); push(std::nullopt);
        break;
      case MissionCommand::waypoint:
        push(item.hold_s ? *item.hold_s : 0.0);
        push(0.0); push(0.0);
        push(item.yaw_deg);
        break;
      case MissionCommand::change_speed:
        push(1.0);  // groundspeed
        push(item.speed_mps);
        push(-1.0); push(0.0);
        break;
      case MissionCommand::condition_yaw:
        push(item.yaw_deg);
        push(0.0); push(0.0); push(0.0);
        break;
      case MissionCommand::loiter_time:
        push(item.hold_s);
        push(0.0); push(0.0); push(std::nullopt);
        break;
      case MissionCommand::return_to_launch:
        push(0.0); push(0.0); push(0.0); push(0.0);
        break;
      case MissionCommand::other:
        for (std::size_t i = 0; i < 4; ++i) push(item.other_params[i]);
        break;
    }
    if (item.command == MissionCommand::other) {
      for (std::size_t i = 4; i < 7; ++i) push(item.other_params[i]);
    } else if (item.coordinate) {
      push(item.coordinate->lat_deg);
      push(item.coordinate->lon_deg);
      push(item.coordinate->alt_m);
    } else {
      push(std::nullopt); push(std::nullopt); push(std::nullopt);
    }

    items.push_back(ordered_json{
        {"type", "SimpleItem"},
        {"autoContinue", true},
        {"command", item.command_code},
        {"doJumpId", item.seq + 1},
        {"frame", mission_detail::frame_to_code(item.frame)},
        {"params", std::move(params)},
    });
  }

  ordered_json mission{{"version", 2}, {"items", std::move(items)}};
  if (plan.cruise_speed_mps) mission["cruiseSpeed"] = *plan.cruise_speed_mps;
  if (plan.home) {
    ordered_json hp = ordered_json::array({plan.home->lat_deg, plan.home->lon_deg});
    if (plan.home->alt_m) hp.push_back(*plan.home->alt_m);
    mission["plannedHomePosition"] = std::move(hp);
  }
  ordered_json doc{
      {"fileType", "Plan"},
      {"version", 1},
      {"mission", std::move(mission)},
      {"geoFence", {{"circles", ordered_json::array()}, {"polygons", ordered_json::array()}, {"version", 2}}},
      {"rallyPoints", {{"points", ordered_json::array()}, {"version", 2}}},
  };
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Mission narrative and planned polyline

struct MissionSummary {
  std::string narrative;            // one line per item
  std::vector<GeoPoint> polyline;   // takeoff + coordinate-carrying items in order
};

namespace mission_detail {

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

inline std::string coord_text(const GeoPoint& p) {
  std::string out = "(" + fmt_num(p.lat_deg) + ", " + fmt_num(p.lon_deg) + ")";
  if (p.alt_m) out += " alt " + fmt_num(*p.alt_m) + " m";
  return out;
}

/// Resolves an item's altitude to AMSL when the frame is relative and the
/// plan home carries altitude; otherwise the raw value is kept.
inline GeoPoint resolve_alt(const MissionItem& item, const std::optional<GeoPoint>& home) {
  GeoPoint p = *item.coordinate;
  if (item.frame == MissionFrame::global_relative_alt && p.alt_m && home && home->alt_m) {
    p.alt_m = *home->alt_m + *p.alt_m;
  }
  return p;
}

}  // namespace mission_detail

inline MissionSummary mission_summary(const MissionPlan& plan) {
  using mission_detail::coord_text;
  using mission_detail::fmt_num;
  MissionSummary out;
  if (plan.items.empty()) {
    out.narrative = "no mission items";
    return out;
  }
  std::string text;
  for (const auto& item : plan.items) {
    std::string line = std::to_string(item.seq) + ": ";
    switch (item.command) {
      case MissionCommand::takeoff:
        line += "takeoff";
        if (item.coordinate && item.coordinate->alt_m) {
          line += " to " + fmt_num(*item.coordinate->alt_m) + " m";
        }
        if (item.coordinate) line += " at " + coord_text(*item.coordinate);
        break;
      case MissionCommand::waypoint:
        line += "waypoint " + coord_text(*item.coordinate);
        if (item.hold_s) line += ", hold " + fmt_num(*item.hold_s) + " s";
        if (item.yaw_deg) line += ", yaw " + fmt_num(*item.yaw_deg) + " deg";
        break;
      case MissionCommand::change_speed:
        line += "change speed to " + fmt_num(*item.speed_mps) + " m/s";
        break;
      case MissionCommand::condition_yaw:
        line += "yaw to " + fmt_num(*item.yaw_deg) + " deg";
        break;
      case MissionCommand::loiter_time:
        line += "loiter";
        if (item.coordinate) line += " at " + coord_text(*item.coordinate);
        line += ", hold " + fmt_num(item.hold_s ? *item.hold_s : 0.0) + " s";
        break;
      case MissionCommand::return_to_launch:
        line += "return to launch";
        break;
      case MissionCommand::land:
        line += "land";
        if (item.coordinate) line += " at " + coord_text(*item.coordinate);
        break;
      case MissionCommand::other:
        line += "command " + std::to_string(item.command_code) + " (not decoded)";
        if (item.coordinate) line += " at " + coord_text(*item.coordinate);
        break;
    }
    text += line + "\n";
    if (item.coordinate &&
        (item.command == MissionCommand::takeoff || item.command == MissionCommand::waypoint ||
         item.command == MissionCommand::loiter_time || item.command == MissionCommand::land)) {
      out.polyline.push_back(mission_detail::resolve_alt(item, plan.home));
    }
  }
  out.narrative = text;
  return out;
}

// ---------------------------------------------------------------------------
// Plan vs. flown track

struct WaypointApproach {
  int seq = 0;
  GeoPoint planned;
  double closest_m = 0.0;
  std::uint64_t t_closest_us = 0;

  bool operator==(const WaypointApproach&) const = default;
};

struct PlanDeviation {
  std::vector<WaypointApproach> per_waypoint;
  std::vector<int> unreached;
  bool completed_rtl = false;
  std::vector<std::string> notes;
};

/// Default "reached" radius: the GPS accuracy class of the receiver on
/// this class of UAV. Configurable per run.
inline constexpr double kDefaultReachRadiusM = 3.0;

/// Closest-approach comparison of planned waypoints against the flown
/// trajectory. 3D distance (horizontal great-circle + altitude); a
/// waypoint is reached when the track came within reach_radius_m.
inline PlanDeviation compare_plan_to_track(const MissionPlan& plan, const Trajectory& traj,
                                           double reach_radius_m = kDefaultReachRadiusM) {
  if (traj.samples.empty()) {
    throw ComparisonError("cannot compare plan against an empty trajectory");
  }
  if (!(reach_radius_m > 0)) throw ValidationError("reach_radius_m must be > 0");

  PlanDeviation dev;
  for (const auto& item : plan.items) {
    const bool spatial =
        item.coordinate &&
        (item.command == MissionCommand::takeoff || item.command == MissionCommand::waypoint ||
         item.command == MissionCommand::loiter_time || item.command == MissionCommand::land);
    if (!spatial) continue;
    if (item.frame == MissionFrame::local) {
      dev.notes.push_back("item " + std::to_string(item.seq) +
                          " uses a local frame; not compared");
      continue;
    }
    const GeoPoint target = mission_detail::resolve_alt(item, plan.home);
    WaypointApproach wa;
    wa.seq = item.seq;
    wa.planned = target;
    wa.closest_m = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.samples) {
      const double d = distance_3d_m(target, s.position);
      if (d < wa.closest_m) {
        wa.closest_m = d;
        wa.t_closest_us = s.t_us;
      }
    }
    if (wa.closest_m > reach_radius_m) dev.unreached.push_back(item.seq);
    dev.per_waypoint.push_back(wa);
  }

  std::optional<GeoPoint> home = plan.home;
  if (!home) {
    for (const auto& item : plan.items) {
      if (item.command == MissionCommand::takeoff && item.coordinate) {
        home = item.coordinate;
        break;
      }
    }
  }
  if (home) {
    GeoPoint h = *home;
    h.alt_m.reset();  // landing altitude vs. planned home altitude is not probative
    dev.completed_rtl = haversine_m(h, traj.samples.back().position) <= reach_radius_m;
  } else {
    dev.completed_rtl = false;
    dev.notes.push_back("plan has no home or takeoff coordinate; RTL completion unknown");
  }
  return dev;
}

}  // namespace uavf
