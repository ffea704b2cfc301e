#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavf/evidence.hpp"
#include "uavf/geo.hpp"
#include "uavf/media.hpp"
#include "uavf/mission.hpp"
#include "uavf/params.hpp"
#include "uavf/power.hpp"
#include "uavf/track.hpp"
#include "uavf/version.hpp"

namespace uavf {

// Presentation phase: everything the examination produced, assembled into
// one report. Every section is always present; absent evidence renders as
// an explicit "not available" with the reason, never as an omission.

struct MissionSection {
  std::string narrative;
  std::vector<GeoPoint> polyline;
  std::optional<PlanDeviation> deviation;
};

struct ForensicReport {
  std::string toolkit_version;
  UtcTime generated_at;

  std::optional<CaseManifest> case_manifest;
  std::vector<std::pair<std::string, VerifyStatus>> verification;  // parallel to case items
  std::optional<std::vector<ComponentRecord>> components;
  std::optional<std::vector<Finding>> parameter_findings;
  std::optional<MissionSection> mission;
  std::optional<FlightSummary> flight;
  std::optional<RangeEstimate> range;
  std::optional<std::vector<GeotagResult>> media;
  std::vector<std::string> data_quality;

  // section name -> reason, for sections that are not available
  std::map<std::string, std::string> absent_reasons;
};

inline constexpr const char* kReportSections[] = {
    "case", "components", "parameters", "mission",
    "flight", "range", "media", "data_quality",
};

struct ReportInputs {
  std::optional<CaseManifest> manifest;
  std::vector<std::pair<std::string, VerifyStatus>> verification;
  std::optional<std::vector<ComponentRecord>> components;
  std::optional<std::vector<Finding>> findings;
  std::optional<MissionSection> mission;
  std::optional<FlightSummary> flight;
  std::optional<RangeEstimate> range;
  std::optional<std::vector<GeotagResult>> media;
  std::vector<std::string> data_quality;
  std::map<std::string, std::string> absent_reasons;  // overrides the generic reason
};

/// Deterministic assembly. Missing analyses become explicit "not
/// available" sections carrying a reason.
inline ForensicReport build_report(ReportInputs inputs) {
  ForensicReport r;
  r.toolkit_version = kToolkitVersion;
  r.generated_at = now_utc();
  r.case_manifest = std::move(inputs.manifest);
  r.verification = std::move(inputs.verification);
  r.components = std::move(inputs.components);
  r.parameter_findings = std::move(inputs.findings);
  r.mission = std::move(inputs.mission);
  r.flight = std::move(inputs.flight);
  r.range = std::move(inputs.range);
  r.media = std::move(inputs.media);
  r.data_quality = std::move(inputs.data_quality);
  r.absent_reasons = std::move(inputs.absent_reasons);

  auto reason = [&r](const char* section, const char* generic) {
    if (!r.absent_reasons.count(section)) r.absent_reasons[section] = generic;
  };
  if (!r.case_manifest || r.case_manifest->items.empty()) {
    reason("case", "no evidence items ingested");
  }
  if (!r.components || r.components->empty()) reason("components", "no component records");
  if (!r.parameter_findings) reason("parameters", "no parameter data");
  if (!r.mission) reason("mission", "no mission plan");
  if (!r.flight) reason("flight", "no flight log");
  if (!r.range) reason("range", "no battery observation");
  if (!r.media) reason("media", "no media manifest");
  if (r.data_quality.empty()) reason("data_quality", "no data-quality notes");
  return r;
}

// ---------------------------------------------------------------------------
// JSON rendering (canonical form; schema at schema/report.schema.json)

namespace report_detail {

using nlohmann::ordered_json;

inline ordered_json geopoint_json(const GeoPoint& p) {
  ordered_json j{{"lat_deg", p.lat_deg}, {"lon_deg", p.lon_deg}};
  if (p.alt_m) j["alt_m"] = *p.alt_m;
  return j;
}

inline GeoPoint geopoint_from_json(const nlohmann::json& j) {
  GeoPoint p;
  p.lat_deg = j.at("lat_deg").get<double>();
  p.lon_deg = j.at("lon_deg").get<double>();
  if (j.contains("alt_m")) p.alt_m = j["alt_m"].get<double>();
  return p;
}

inline ordered_json unavailable(const std::string& reason) {
  return ordered_json{{"available", false}, {"reason", reason}};
}

}  // namespace report_detail

inline std::string render_json(const ForensicReport& r) {
  using nlohmann::ordered_json;
  using namespace report_detail;

  ordered_json doc;
  doc["toolkit_version"] = r.toolkit_version;
  doc["generated_at"] = render_rfc3339(r.generated_at);

  // case
  if (r.case_manifest && !r.case_manifest->items.empty()) {
    ordered_json section{{"available", true}};
    section["manifest"] = to_json(*r.case_manifest);
    ordered_json ver = ordered_json::array();
    for (const auto& [id, status] : r.verification) {
      ver.push_back(ordered_json{{"item_id", id}, {"status", to_string(status)}});
    }
    section["verification"] = std::move(ver);
    doc["case"] = std::move(section);
  } else {
    doc["case"] = unavailable(r.absent_reasons.at("case"));
  }

  if (r.components && !r.components->empty()) {
    ordered_json list = ordered_json::array();
    for (const auto& c : *r.components) list.push_back(to_json(c));
    doc["components"] = ordered_json{{"available", true}, {"records", std::move(list)}};
  } else {
    doc["components"] = unavailable(r.absent_reasons.at("components"));
  }

  if (r.parameter_findings) {
    ordered_json list = ordered_json::array();
    for (const auto& f : *r.parameter_findings) list.push_back(to_json(f));
    doc["parameters"] = ordered_json{{"available", true}, {"findings", std::move(list)}};
  } else {
    doc["parameters"] = unavailable(r.absent_reasons.at("parameters"));
  }

  if (r.mission) {
    ordered_json section{{"available", true}, {"narrative", r.mission->narrative}};
    ordered_json poly = ordered_json::array();
    for (const auto& p : r.mission->polyline) poly.push_back(geopoint_json(p));
    section["polyline"] = std::move(poly);
    if (r.mission->deviation) {
      const auto& d = *r.mission->deviation;
      ordered_json per = ordered_json::array();
      for (const auto& wa : d.per_waypoint) {
        per.push_back(ordered_json{{"seq", wa.seq},
                                   {"planned", geopoint_json(wa.planned)},
                                   {"closest_m", wa.closest_m},
                                   {"t_closest_us", wa.t_closest_us}});
      }
      section["deviation"] = ordered_json{{"per_waypoint", std::move(per)},
                                          {"unreached", d.unreached},
                                          {"completed_rtl", d.completed_rtl},
                                          {"notes", d.notes}};
    }
    doc["mission"] = std::move(section);
  } else {
    doc["mission"] = unavailable(r.absent_reasons.at("mission"));
  }

  if (r.flight) {
    const auto& f = *r.flight;
    ordered_json section{{"available", true}};
    section["total_flight_time_s"] = f.total_flight_time_s;
    section["total_distance_m"] = f.total_distance_m;
    section["avg_speed_mps"] = f.avg_speed_mps;
    section["max_speed_mps"] = f.max_speed_mps;
    section["max_up_speed_mps"] = f.max_up_speed_mps;
    section["max_down_speed_mps"] = f.max_down_speed_mps;
    if (f.max_tilt_deg) section["max_tilt_deg"] = *f.max_tilt_deg;
    section["os_version"] = f.os_version;
    section["estimator"] = f.estimator;
    section["arming_offset_s"] = f.arming_offset_s;
    section["notes"] = f.notes;
    doc["flight"] = std::move(section);
  } else {
    doc["flight"] = unavailable(r.absent_reasons.at("flight"));
  }

  if (r.range) {
    const auto& e = *r.range;
    doc["range"] = ordered_json{{"available", true},
                                {"e_total_wh", e.e_total_wh},
                                {"e_remaining_wh", e.e_remaining_wh},
                                {"e_used_wh", e.e_used_wh},
                                {"t_flight_s", e.t_flight_s},
                                {"r_max_m", e.r_max_m},
                                {"v_avg_mps", e.v_avg_mps},
                                {"assumptions", e.assumptions}};
  } else {
    doc["range"] = unavailable(r.absent_reasons.at("range"));
  }

  if (r.media) {
    ordered_json list = ordered_json::array();
    for (const auto& g : *r.media) {
      ordered_json gj{{"file", g.file},
                      {"confidence", to_string(g.confidence)},
                      {"t_log_us", g.t_log_us}};
      if (g.confidence == GeotagConfidence::interpolated) {
        gj["position"] = geopoint_json(g.position);
        gj["sample_gap_s"] = g.sample_gap_s;
      }
      list.push_back(std::move(gj));
    }
    doc["media"] = ordered_json{{"available", true}, {"geotags", std::move(list)}};
  } else {
    doc["media"] = unavailable(r.absent_reasons.at("media"));
  }

  if (!r.data_quality.empty()) {
    doc["data_quality"] = ordered_json{{"available", true}, {"notes", r.data_quality}};
  } else {
    doc["data_quality"] = unavailable(r.absent_reasons.at("data_quality"));
  }

  return doc.dump(2) + "\n";
}

/// Inverse of render_json, for round-trip checks and downstream tooling.
inline ForensicReport report_from_json(const std::string& text) {
  using namespace report_detail;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("report is not valid JSON: ") + e.what(), "$");
  }
  ForensicReport r;
  r.toolkit_version = doc.at("toolkit_version").get<std::string>();
  r.generated_at = parse_rfc3339(doc.at("generated_at").get<std::string>());

  auto reason_of = [&r](const char* section, const nlohmann::json& j) {
    r.absent_reasons[section] = j.value("reason", "");
  };

  const auto& cs = doc.at("case");
  if (cs.at("available").get<bool>()) {
    r.case_manifest = case_manifest_from_json(cs.at("manifest"));
    for (const auto& v : cs.at("verification")) {
      const std::string st = v.at("status").get<std::string>();
      VerifyStatus status = VerifyStatus::ok;
      if (st == "hash_mismatch") status = VerifyStatus::hash_mismatch;
      if (st == "missing") status = VerifyStatus::missing;
      r.verification.emplace_back(v.at("item_id").get<std::string>(), status);
    }
  } else {
    reason_of("case", cs);
  }

  const auto& comp = doc.at("components");
  if (comp.at("available").get<bool>()) {
    std::vector<ComponentRecord> records;
    for (const auto& cj : comp.at("records")) records.push_back(component_record_from_json(cj));
    r.components = std::move(records);
  } else {
    reason_of("components", comp);
  }

  const auto& pj = doc.at("parameters");
  if (pj.at("available").get<bool>()) {
    std::vector<Finding> findings;
    for (const auto& fj : pj.at("findings")) {
      Finding f;
      f.code = fj.at("code").get<std::string>();
      f.severity = severity_from_string(fj.at("severity").get<std::string>());
      f.parameter = fj.at("parameter").get<std::string>();
      f.observed = fj.at("observed").get<std::string>();
      f.meaning = fj.at("meaning").get<std::string>();
      findings.push_back(std::move(f));
    }
    r.parameter_findings = std::move(findings);
  } else {
    reason_of("parameters", pj);
  }

  const auto& mj = doc.at("mission");
  if (mj.at("available").get<bool>()) {
    MissionSection section;
    section.narrative = mj.at("narrative").get<std::string>();
    for (const auto& p : mj.at("polyline")) section.polyline.push_back(geopoint_from_json(p));
    if (mj.contains("deviation")) {
      PlanDeviation d;
      for (const auto& wj : mj["deviation"].at("per_waypoint")) {
        WaypointApproach wa;
        wa.seq = wj.at("seq").get<int>();
        wa.planned = geopoint_from_json(wj.at("planned"));
        wa.closest_m = wj.at("closest_m").get<double>();
        wa.t_closest_us = wj.at("t_closest_us").get<std::uint64_t>();
        d.per_waypoint.push_back(wa);
      }
      d.unreached = mj["deviation"].at("unreached").get<std::vector<int>>();
      d.completed_rtl = mj["deviation"].at("completed_rtl").get<bool>();
      d.notes = mj["deviation"].at("notes").get<std::vector<std::string>>();
      section.deviation = std::move(d);
    }
    r.mission = std::move(section);
  } else {
    reason_of("mission", mj);
  }

  const auto& fj = doc.at("flight");
  if (fj.at("available").get<bool>()) {
    FlightSummary f;
    f.total_flight_time_s = fj.at("total_flight_time_s").get<double>();
    f.total_distance_m = fj.at("total_distance_m").get<double>();
    f.avg_speed_mps = fj.at("avg_speed_mps").get<double>();
    f.max_speed_mps = fj.at("max_speed_mps").get<double>();
    f.max_up_speed_mps = fj.at("max_up_speed_mps").get<double>();
    f.max_down_speed_mps = fj.at("max_down_speed_mps").get<double>();
    if (fj.contains("max_tilt_deg")) f.max_tilt_deg = fj["max_tilt_deg"].get<double>();
    f.os_version = fj.at("os_version").get<std::string>();
    f.estimator = fj.at("estimator").get<std::string>();
    f.arming_offset_s = fj.at("arming_offset_s").get<double>();
    f.notes = fj.at("notes").get<std::vector<std::string>>();
    r.flight = std::move(f);
  } else {
    reason_of("flight", fj);
  }

  const auto& rj = doc.at("range");
  if (rj.at("available").get<bool>()) {
    RangeEstimate e;
    e.e_total_wh = rj.at("e_total_wh").get<double>();
    e.e_remaining_wh = rj.at("e_remaining_wh").get<double>();
    e.e_used_wh = rj.at("e_used_wh").get<double>();
    e.t_flight_s = rj.at("t_flight_s").get<double>();
    e.r_max_m = rj.at("r_max_m").get<double>();
    e.v_avg_mps = rj.at("v_avg_mps").get<double>();
    e.assumptions = rj.at("assumptions").get<std::vector<std::string>>();
    r.range = std::move(e);
  } else {
    reason_of("range", rj);
  }

  const auto& med = doc.at("media");
  if (med.at("available").get<bool>()) {
    std::vector<GeotagResult> tags;
    for (const auto& gj : med.at("geotags")) {
      GeotagResult g;
      g.file = gj.at("file").get<std::string>();
      const std::string conf = gj.at("confidence").get<std::string>();
      g.confidence = GeotagConfidence::out_of_flight;
      if (conf == "interpolated") g.confidence = GeotagConfidence::interpolated;
      if (conf == "extrapolation_refused") g.confidence = GeotagConfidence::extrapolation_refused;
      g.t_log_us = gj.at("t_log_us").get<std::int64_t>();
      if (gj.contains("position")) g.position = geopoint_from_json(gj["position"]);
      if (gj.contains("sample_gap_s")) g.sample_gap_s = gj["sample_gap_s"].get<double>();
      tags.push_back(std::move(g));
    }
    r.media = std::move(tags);
  } else {
    reason_of("media", med);
  }

  const auto& dq = doc.at("data_quality");
  if (dq.at("available").get<bool>()) {
    r.data_quality = dq.at("notes").get<std::vector<std::string>>();
  } else {
    reason_of("data_quality", dq);
  }

  return r;
}

// ---------------------------------------------------------------------------
// Markdown rendering (projection of the JSON; same section order)

namespace report_detail {

inline std::string fmt(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace report_detail

inline std::string render_markdown(const ForensicReport& r) {
  using report_detail::fmt;
  std::string md;
  md += "# UAV forensic report\n\n";
  md += "- Toolkit version: " + r.toolkit_version + "\n";
  md += "- Generated at: " + render_rfc3339(r.generated_at) + "\n\n";

  auto not_available = [&](const char* section) {
    auto it = r.absent_reasons.find(section);
    md += "not available";
    if (it != r.absent_reasons.end() && !it->second.empty()) md += ": " + it->second;
    md += "\n\n";
  };

  md += "## Case\n\n";
  if (r.case_manifest && !r.case_manifest->items.empty()) {
    md += "- Case ID: " + r.case_manifest->case_id + "\n";
    md += "- Created: " + render_rfc3339(r.case_manifest->created_at) + "\n";
    if (!r.case_manifest->notes.empty()) md += "- Notes: " + r.case_manifest->notes + "\n";
    md += "\n| Item | Kind | SHA-256 | Custody |\n|---|---|---|---|\n";
    for (std::size_t i = 0; i < r.case_manifest->items.size(); ++i) {
      const auto& item = r.case_manifest->items[i];
      std::string status = "unverified";
      for (const auto& [id, st] : r.verification) {
        if (id == item.item_id) status = to_string(st);
      }
      md += "| " + item.item_id + " | " + to_string(item.kind) + " | " + item.sha256 +
            " | " + status + " |\n";
    }
    md += "\n";
  } else {
    not_available("case");
  }

  md += "## Components\n\n";
  if (r.components && !r.components->empty()) {
    md += "| Component | Description | Serial | Mass (g) | Size (cm) |\n|---|---|---|---|---|\n";
    for (const auto& c : *r.components) {
      md += std::string("| ") + to_string(c.component) + " | " + c.description + " | " +
            (c.serial_number ? *c.serial_number : "-") + " | " +
            (c.mass_g ? fmt(*c.mass_g, 0) : "-") + " | " +
            (c.dimension_cm ? fmt(*c.dimension_cm, 0) : "-") + " |\n";
    }
    md += "\n";
  } else {
    not_available("components");
  }

  md += "## Parameter findings\n\n";
  if (r.parameter_findings) {
    if (r.parameter_findings->empty()) {
      md += "No catalog rule matched the recorded parameters.\n\n";
    } else {
      md += "| Severity | Code | Parameter | Observed | Meaning |\n|---|---|---|---|---|\n";
      for (const auto& f : *r.parameter_findings) {
        md += std::string("| ") + to_string(f.severity) + " | " + f.code + " | " +
              f.parameter + " | " + f.observed + " | " + f.meaning + " |\n";
      }
      md += "\n";
    }
  } else {
    not_available("parameters");
  }

  md += "## Mission\n\n";
  if (r.mission) {
    md += "```\n" + r.mission->narrative;
    if (!r.mission->narrative.empty() && r.mission->narrative.back() != '\n') md += "\n";
    md += "```\n\n";
    if (r.mission->deviation) {
      const auto& d = *r.mission->deviation;
      md += "- Completed return to launch: " + std::string(d.completed_rtl ? "yes" : "no") + "\n";
      if (d.unreached.empty()) {
        md += "- All planned waypoints were reached.\n";
      } else {
        md += "- Unreached waypoints (seq):";
        for (int seq : d.unreached) md += " " + std::to_string(seq);
        md += "\n";
      }
      for (const auto& wa : d.per_waypoint) {
        md += "  - seq " + std::to_string(wa.seq) + ": closest approach " +
              fmt(wa.closest_m, 1) + " m at t=" + fmt(wa.t_closest_us / 1e6, 1) + " s\n";
      }
      md += "\n";
    }
  } else {
    not_available("mission");
  }

  md += "## Flight\n\n";
  if (r.flight) {
    const auto& f = *r.flight;
    md += "| Statistic | Value |\n|---|---|\n";
    md += "| Total flight time | " + fmt(f.total_flight_time_s, 1) + " s |\n";
    md += "| Total distance | " + fmt(f.total_distance_m, 1) + " m |\n";
    md += "| Average speed | " + fmt(f.avg_speed_mps, 2) + " m/s |\n";
    md += "| Max speed | " + fmt(f.max_speed_mps, 2) + " m/s |\n";
    md += "| Max up speed | " + fmt(f.max_up_speed_mps, 2) + " m/s |\n";
    md += "| Max down speed | " + fmt(f.max_down_speed_mps, 2) + " m/s |\n";
    md += "| Max tilt angle | " +
          (f.max_tilt_deg ? fmt(*f.max_tilt_deg, 1) + " deg" : std::string("not available")) +
          " |\n";
    md += "| OS version | " + f.os_version + " |\n";
    md += "| Estimator | " + f.estimator + " |\n";
    md += "| Armed at (power-on clock) | +" + fmt(f.arming_offset_s, 1) + " s |\n";
    for (const auto& n : f.notes) md += "\n> " + n + "\n";
    md += "\n";
  } else {
    not_available("flight");
  }

  md += "## Range estimate\n\n";
  if (r.range) {
    const auto& e = *r.range;
    md += "- Battery energy when full: " + fmt(e.e_total_wh, 2) + " Wh\n";
    md += "- Energy remaining at recovery: " + fmt(e.e_remaining_wh, 2) + " Wh\n";
    md += "- Energy used: " + fmt(e.e_used_wh, 2) + " Wh\n";
    md += "- Estimated flight time: " + fmt(e.t_flight_s, 1) + " s\n";
    md += "- Assumed average speed: " + fmt(e.v_avg_mps, 1) + " m/s\n";
    md += "- Maximum range: " + fmt(e.r_max_m, 0) + " m\n";
    for (const auto& a : e.assumptions) md += "\n> " + a + "\n";
    md += "\n";
  } else {
    not_available("range");
  }

  md += "## Media\n\n";
  if (r.media) {
    if (r.media->empty()) {
      md += "Media manifest present but contains no timestamped entries.\n\n";
    } else {
      md += "| File | Status | Log time (s) | Position |\n|---|---|---|---|\n";
      for (const auto& g : *r.media) {
        std::string pos = "-";
        if (g.confidence == GeotagConfidence::interpolated) {
          pos = fmt(g.position.lat_deg, 7) + ", " + fmt(g.position.lon_deg, 7);
          if (g.position.alt_m) pos += ", " + fmt(*g.position.alt_m, 1) + " m";
        }
        md += "| " + g.file + " | " + to_string(g.confidence) + " | " +
              fmt(g.t_log_us / 1e6, 3) + " | " + pos + " |\n";
      }
      md += "\n";
    }
  } else {
    not_available("media");
  }

  md += "## Data quality\n\n";
  if (!r.data_quality.empty()) {
    for (const auto& n : r.data_quality) md += "- " + n + "\n";
    md += "\n";
  } else {
    not_available("data_quality");
  }

  return md;
}

}  // namespace uavf
