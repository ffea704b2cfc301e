// uavf — UAV flight-evidence forensic toolkit, command-line front end.
//
// Subcommands operate on a case directory laid out as case/<kind>/<files>
// (flight_log/, mission_plan/, battery_observation/, media_manifest/,
// media/, component_record/, parameter_dump/, other/). Each subcommand is
// independently re-runnable; outputs land in --out (default
// <case>/analysis). Exit codes: 0 success, 1 usage error, 2 evidence
// format/read error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "uavf/evidence.hpp"
#include "uavf/exif.hpp"
#include "uavf/geo_export.hpp"
#include "uavf/media.hpp"
#include "uavf/mission.hpp"
#include "uavf/params.hpp"
#include "uavf/power.hpp"
#include "uavf/report.hpp"
#include "uavf/track.hpp"
#include "uavf/ulog.hpp"
#include "uavf/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitEvidence = 2;

struct Options {
  std::string case_dir;
  std::string out_dir;
  std::string catalog_path;
  double reach_radius_m = uavf::kDefaultReachRadiusM;
  std::string log_epoch;       // RFC 3339; empty = derive from GPS when possible
  double camera_offset_s = 0;
  // Standalone range inputs.
  double capacity_mah = 0, full_v = 0, empty_v = uavf::kDefaultEmptyVoltage4s;
  double observed_v = 0, motor_w = 0, avionics_w = 0, cruise_mps = 0;
  int motors = 4;
  std::string case_id, notes;
  bool verify = false;
};

fs::path out_dir(const Options& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  return fs::path(opt.case_dir) / "analysis";
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw uavf::IngestError("cannot write output file", path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw uavf::IngestError("cannot read file", path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<fs::path> files_in(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (de.is_regular_file()) out.push_back(de.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Case evidence access

std::vector<fs::path> case_files(const Options& opt, uavf::EvidenceKind kind) {
  return files_in(fs::path(opt.case_dir) / uavf::to_string(kind));
}

std::optional<uavf::ulog::FlightLog> load_first_log(const Options& opt, std::string* log_id) {
  auto logs = case_files(opt, uavf::EvidenceKind::flight_log);
  if (logs.empty()) return std::nullopt;
  if (logs.size() > 1) {
    std::cerr << "note: " << logs.size() << " flight logs present; analyzing "
              << logs.front().filename().string() << "\n";
  }
  if (log_id) *log_id = logs.front().stem().string();
  return uavf::ulog::parse_ulog_file(logs.front());
}

std::optional<uavf::MissionPlan> load_plan(const Options& opt) {
  auto plans = case_files(opt, uavf::EvidenceKind::mission_plan);
  if (plans.empty()) return std::nullopt;
  return uavf::parse_plan_file(plans.front());
}

struct BatteryDoc {
  uavf::BatterySpec spec;
  uavf::BatteryObservation obs;
  std::optional<uavf::PowerModel> model;  // absent when cruise speed missing
  double per_motor_w = 0, avionics_w = 0;
  int motor_count = 0;
  std::optional<double> cruise_mps;
  bool empty_v_defaulted = false;
};

std::optional<BatteryDoc> load_battery_doc(const Options& opt) {
  auto docs = case_files(opt, uavf::EvidenceKind::battery_observation);
  if (docs.empty()) return std::nullopt;
  json j;
  try {
    j = json::parse(read_file(docs.front()));
  } catch (const json::exception& e) {
    throw uavf::DocumentError(std::string("battery observation is not valid JSON: ") +
                                  e.what(),
                              docs.front().string());
  }
  BatteryDoc doc;
  try {
    const auto& bj = j.at("battery");
    double empty_v = uavf::kDefaultEmptyVoltage4s;
    if (bj.contains("empty_voltage_v")) {
      empty_v = bj["empty_voltage_v"].get<double>();
    } else {
      doc.empty_v_defaulted = true;
    }
    doc.spec = uavf::make_battery_spec(bj.value("cell_count", 1),
                                       bj.at("capacity_mah").get<double>(),
                                       bj.at("full_voltage_v").get<double>(), empty_v);
    doc.obs = uavf::make_battery_observation(j.at("observed_voltage_v").get<double>(), doc.spec);
    const auto& pm = j.at("power_model");
    doc.per_motor_w = pm.at("per_motor_cruise_w").get<double>();
    doc.motor_count = pm.at("motor_count").get<int>();
    doc.avionics_w = pm.value("avionics_w", 0.0);
    if (pm.contains("cruise_speed_mps")) doc.cruise_mps = pm["cruise_speed_mps"].get<double>();
  } catch (const json::exception& e) {
    throw uavf::DocumentError(std::string("battery observation field error: ") + e.what(),
                              docs.front().string());
  }
  if (doc.cruise_mps) {
    doc.model = uavf::make_power_model(doc.per_motor_w, doc.motor_count, doc.avionics_w,
                                       *doc.cruise_mps);
  }
  return doc;
}

std::vector<uavf::ComponentRecord> load_components(const Options& opt) {
  std::vector<uavf::ComponentRecord> out;
  for (const auto& f : case_files(opt, uavf::EvidenceKind::component_record)) {
    json j;
    try {
      j = json::parse(read_file(f));
    } catch (const json::exception& e) {
      throw uavf::DocumentError(std::string("component record is not valid JSON: ") + e.what(),
                                f.string());
    }
    if (j.is_array()) {
      for (const auto& cj : j) out.push_back(uavf::component_record_from_json(cj));
    } else {
      out.push_back(uavf::component_record_from_json(j));
    }
  }
  return out;
}

std::optional<uavf::MediaManifest> load_media_manifest(const Options& opt,
                                                       std::string* source_note) {
  auto manifests = case_files(opt, uavf::EvidenceKind::media_manifest);
  if (!manifests.empty()) {
    if (source_note) *source_note = "manifest file " + manifests.front().filename().string();
    return uavf::parse_media_manifest(read_file(manifests.front()));
  }
  const fs::path media_dir = fs::path(opt.case_dir) / "media";
  if (fs::is_directory(media_dir)) {
    if (source_note) *source_note = "built from media/ directory (EXIF timestamps)";
    return uavf::build_media_manifest(media_dir);
  }
  return std::nullopt;
}

uavf::FindingCatalog load_catalog(const Options& opt) {
  if (opt.catalog_path.empty()) return uavf::default_catalog();
  return uavf::parse_catalog(read_file(opt.catalog_path));
}

// ---------------------------------------------------------------------------
// Subcommand bodies

int cmd_ingest(const Options& opt) {
  const fs::path case_dir(opt.case_dir);
  const fs::path manifest_path = case_dir / "manifest.json";

  if (opt.verify && fs::exists(manifest_path)) {
    auto manifest = uavf::parse_manifest(read_file(manifest_path));
    int bad = 0;
    for (const auto& [id, status] : uavf::verify_manifest(manifest, case_dir)) {
      std::cout << id << ": " << uavf::to_string(status) << "\n";
      if (status != uavf::VerifyStatus::ok) ++bad;
    }
    std::cout << (bad == 0 ? "custody intact" : "custody violations: " + std::to_string(bad))
              << "\n";
    return kExitOk;
  }

  uavf::CaseManifest manifest = uavf::make_case_manifest(
      opt.case_id.empty() ? case_dir.filename().string() : opt.case_id, uavf::now_utc(),
      opt.notes);
  for (uavf::EvidenceKind kind :
       {uavf::EvidenceKind::flight_log, uavf::EvidenceKind::mission_plan,
        uavf::EvidenceKind::parameter_dump, uavf::EvidenceKind::battery_observation,
        uavf::EvidenceKind::media_manifest, uavf::EvidenceKind::component_record,
        uavf::EvidenceKind::other}) {
    for (const auto& f : case_files(opt, kind)) {
      auto item = uavf::ingest_evidence(f, kind);
      // Store case-relative paths so the manifest travels with the case.
      item.source_path = fs::relative(f, case_dir).string();
      manifest.add_item(std::move(item));
    }
  }
  for (const auto& f : files_in(case_dir / "media")) {
    auto item = uavf::ingest_evidence(f, uavf::EvidenceKind::other);
    item.source_path = fs::relative(f, case_dir).string();
    manifest.add_item(std::move(item));
  }

  write_file(manifest_path, uavf::render_manifest(manifest));
  std::cout << "ingested " << manifest.items.size() << " evidence item(s) -> "
            << manifest_path.string() << "\n";
  return kExitOk;
}

int cmd_log(const Options& opt) {
  auto logs = case_files(opt, uavf::EvidenceKind::flight_log);
  if (logs.empty()) {
    std::cerr << "no flight logs under " << opt.case_dir << "/flight_log\n";
    return kExitEvidence;
  }
  for (const auto& f : logs) {
    const auto log = uavf::ulog::parse_ulog_file(f);
    ordered_json j;
    j["file"] = f.filename().string();
    j["header"] = {{"version", log.header.version},
                   {"start_timestamp_us", log.header.start_timestamp_us}};
    ordered_json params = ordered_json::object();
    for (const auto& [name, entry] : log.parameters.entries) {
      ordered_json pj;
      if (auto v = entry.latest()) {
        if (std::holds_alternative<float>(*v)) {
          pj["value"] = std::get<float>(*v);
        } else {
          pj["value"] = std::get<std::int32_t>(*v);
        }
      }
      pj["provenance"] = uavf::ulog::to_string(*entry.latest_provenance());
      params[name] = std::move(pj);
    }
    j["parameters"] = std::move(params);
    ordered_json series = ordered_json::array();
    for (const auto& [key, ts] : log.series) {
      series.push_back(ordered_json{{"name", ts.message_name},
                                    {"multi_id", ts.multi_id},
                                    {"columns", ts.columns.size()},
                                    {"rows", ts.rows.size()}});
    }
    j["series"] = std::move(series);
    ordered_json text = ordered_json::array();
    for (const auto& lm : log.logged_text) {
      text.push_back(ordered_json{
          {"timestamp_us", lm.timestamp_us}, {"level", lm.level}, {"text", lm.text}});
    }
    j["logged_text"] = std::move(text);
    ordered_json drops = ordered_json::array();
    for (const auto& d : log.dropouts) {
      drops.push_back(
          ordered_json{{"timestamp_us", d.timestamp_us}, {"duration_ms", d.duration_ms}});
    }
    j["dropouts"] = std::move(drops);
    j["quality"] = ordered_json{{"truncated", log.quality.truncated},
                                {"unknown_message_types", log.quality.unknown_message_types},
                                {"unknown_msg_id_records", log.quality.unknown_msg_id_records},
                                {"malformed_messages", log.quality.malformed_messages},
                                {"notes", log.quality.notes}};
    const fs::path out = out_dir(opt) / (f.stem().string() + ".log.json");
    write_file(out, j.dump(2) + "\n");
    std::cout << f.filename().string() << ": " << log.series.size() << " series, "
              << log.parameters.entries.size() << " parameters -> " << out.string() << "\n";
  }
  return kExitOk;
}

int cmd_params(const Options& opt) {
  std::string log_id;
  auto log = load_first_log(opt, &log_id);
  if (!log) {
    std::cerr << "no flight log to extract parameters from\n";
    return kExitEvidence;
  }
  const auto catalog = load_catalog(opt);
  const auto findings = uavf::analyze_parameters(log->parameters, catalog);
  ordered_json list = ordered_json::array();
  for (const auto& f : findings) list.push_back(uavf::to_json(f));
  ordered_json j{{"catalog", catalog.name},
                 {"parameters_analyzed", log->parameters.entries.size()},
                 {"findings", std::move(list)}};
  const fs::path out = out_dir(opt) / "findings.json";
  write_file(out, j.dump(2) + "\n");
  for (const auto& f : findings) {
    std::cout << uavf::to_string(f.severity) << "  " << f.code << "  (" << f.parameter << "="
              << f.observed << ")  " << f.meaning << "\n";
  }
  std::cout << findings.size() << " finding(s) -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_mission(const Options& opt) {
  auto plan = load_plan(opt);
  if (!plan) {
    std::cerr << "no mission plan under " << opt.case_dir << "/mission_plan\n";
    return kExitEvidence;
  }
  const auto summary = uavf::mission_summary(*plan);
  ordered_json j;
  j["narrative"] = summary.narrative;
  ordered_json poly = ordered_json::array();
  for (const auto& p : summary.polyline) {
    poly.push_back(ordered_json{{"lat_deg", p.lat_deg},
                                {"lon_deg", p.lon_deg},
                                {"alt_m", p.alt_m ? json(*p.alt_m) : json(nullptr)}});
  }
  j["polyline"] = std::move(poly);

  if (auto log = load_first_log(opt, nullptr)) {
    const auto traj = uavf::build_trajectory(*log);
    const auto dev = uavf::compare_plan_to_track(*plan, traj, opt.reach_radius_m);
    ordered_json per = ordered_json::array();
    for (const auto& wa : dev.per_waypoint) {
      per.push_back(ordered_json{{"seq", wa.seq},
                                 {"closest_m", wa.closest_m},
                                 {"t_closest_us", wa.t_closest_us}});
    }
    j["deviation"] = ordered_json{{"reach_radius_m", opt.reach_radius_m},
                                  {"per_waypoint", std::move(per)},
                                  {"unreached", dev.unreached},
                                  {"completed_rtl", dev.completed_rtl}};
  } else {
    j["deviation"] = nullptr;
  }
  const fs::path out = out_dir(opt) / "mission.json";
  write_file(out, j.dump(2) + "\n");
  std::cout << summary.narrative;
  std::cout << "-> " << out.string() << "\n";
  return kExitOk;
}

int cmd_track(const Options& opt) {
  std::string log_id;
  auto log = load_first_log(opt, &log_id);
  if (!log) {
    std::cerr << "no flight log under " << opt.case_dir << "/flight_log\n";
    return kExitEvidence;
  }
  const auto traj = uavf::build_trajectory(*log);
  const auto summary = uavf::flight_summary(*log, traj);

  std::optional<std::vector<uavf::GeoPoint>> planned;
  if (auto plan = load_plan(opt)) planned = uavf::mission_summary(*plan).polyline;

  const fs::path base = out_dir(opt);
  write_file(base / (log_id + ".track.geojson"),
             uavf::export_geojson(traj, planned ? &*planned : nullptr));
  write_file(base / (log_id + ".track.kml"), uavf::export_kml(traj));

  ordered_json j;
  j["source"] = traj.source_note;
  j["samples"] = traj.samples.size();
  j["total_flight_time_s"] = summary.total_flight_time_s;
  j["total_distance_m"] = summary.total_distance_m;
  j["avg_speed_mps"] = summary.avg_speed_mps;
  j["max_speed_mps"] = summary.max_speed_mps;
  j["max_up_speed_mps"] = summary.max_up_speed_mps;
  j["max_down_speed_mps"] = summary.max_down_speed_mps;
  j["max_tilt_deg"] = summary.max_tilt_deg ? json(*summary.max_tilt_deg) : json(nullptr);
  j["os_version"] = summary.os_version;
  j["estimator"] = summary.estimator;
  j["arming_offset_s"] = summary.arming_offset_s;
  j["notes"] = summary.notes;
  write_file(base / (log_id + ".summary.json"), j.dump(2) + "\n");

  std::cout << "flight time " << summary.total_flight_time_s << " s, distance "
            << summary.total_distance_m << " m, samples " << traj.samples.size() << " -> "
            << (base / (log_id + ".track.geojson")).string() << "\n";
  return kExitOk;
}

int cmd_range(const Options& opt, bool flags_given) {
  uavf::RangeEstimate est;
  std::vector<std::string> extra_notes;
  if (flags_given) {
    const auto spec = uavf::make_battery_spec(4, opt.capacity_mah, opt.full_v, opt.empty_v);
    const auto obs = uavf::make_battery_observation(opt.observed_v, spec);
    const auto model =
        uavf::make_power_model(opt.motor_w, opt.motors, opt.avionics_w, opt.cruise_mps);
    est = uavf::estimate_range(spec, obs, model);
  } else {
    auto doc = load_battery_doc(opt);
    if (!doc) {
      std::cerr << "no battery observation (supply --capacity-mah/--full-v/--observed-v/"
                   "--motor-w/--cruise-mps or a battery_observation/ document)\n";
      return kExitEvidence;
    }
    std::optional<double> cruise = doc->cruise_mps;
    if (!cruise && opt.cruise_mps > 0) cruise = opt.cruise_mps;
    if (!cruise) {
      if (auto log = load_first_log(opt, nullptr)) {
        cruise = uavf::cruise_speed_mps(log->parameters);
        if (cruise) {
          extra_notes.push_back("cruise speed taken from autopilot parameter MPC_XY_CRUISE");
        }
      }
    }
    if (!cruise) {
      std::cerr << "no cruise speed available: supply --cruise-mps, add it to the battery "
                   "document, or provide a flight log with MPC_XY_CRUISE\n";
      return kExitEvidence;
    }
    const auto model =
        uavf::make_power_model(doc->per_motor_w, doc->motor_count, doc->avionics_w, *cruise);
    est = uavf::estimate_range(doc->spec, doc->obs, model);
    if (doc->empty_v_defaulted) {
      extra_notes.push_back("empty voltage not supplied; toolkit default used");
    }
  }
  est.assumptions.insert(est.assumptions.end(), extra_notes.begin(), extra_notes.end());

  char line[256];
  std::snprintf(line, sizeof line,
                "E_total %.2f Wh | E_remaining %.2f Wh | E_used %.2f Wh\n"
                "Estimated flight time: %.1f s\nMaximum range: %.0f m (at %.1f m/s)\n",
                est.e_total_wh, est.e_remaining_wh, est.e_used_wh, est.t_flight_s, est.r_max_m,
                est.v_avg_mps);
  std::cout << line;

  if (!opt.case_dir.empty()) {
    ordered_json j{{"e_total_wh", est.e_total_wh},
                   {"e_remaining_wh", est.e_remaining_wh},
                   {"e_used_wh", est.e_used_wh},
                   {"t_flight_s", est.t_flight_s},
                   {"r_max_m", est.r_max_m},
                   {"v_avg_mps", est.v_avg_mps},
                   {"assumptions", est.assumptions}};
    const fs::path out = out_dir(opt) / "range.json";
    write_file(out, j.dump(2) + "\n");
    std::cout << "-> " << out.string() << "\n";
  }
  return kExitOk;
}

std::optional<uavf::ClockAlignment> resolve_alignment(const Options& opt,
                                                      const uavf::ulog::FlightLog* log) {
  if (!opt.log_epoch.empty()) {
    uavf::ClockAlignment align;
    align.log_epoch_utc = uavf::parse_rfc3339(opt.log_epoch);
    align.camera_offset_s = opt.camera_offset_s;
    align.source = "investigator-supplied (--log-epoch)";
    return align;
  }
  if (log) {
    if (auto derived = uavf::derive_alignment_from_gps(*log)) {
      derived->camera_offset_s = opt.camera_offset_s;
      return derived;
    }
  }
  return std::nullopt;
}

int cmd_media(const Options& opt) {
  std::string manifest_note;
  auto manifest = load_media_manifest(opt, &manifest_note);
  if (!manifest) {
    std::cerr << "no media manifest or media/ directory in case\n";
    return kExitEvidence;
  }
  auto log = load_first_log(opt, nullptr);
  if (!log) {
    std::cerr << "media correlation needs a flight log\n";
    return kExitEvidence;
  }
  auto align = resolve_alignment(opt, &*log);
  if (!align) {
    std::cerr << "no clock alignment: pass --log-epoch (and optionally --camera-offset-s) "
                 "or use a log carrying GPS UTC time\n";
    return kExitEvidence;
  }
  const auto traj = uavf::build_trajectory(*log);
  const auto tags = uavf::geotag(*manifest, traj, *align);

  ordered_json list = ordered_json::array();
  for (const auto& g : tags) {
    ordered_json gj{{"file", g.file},
                    {"confidence", uavf::to_string(g.confidence)},
                    {"t_log_us", g.t_log_us}};
    if (g.confidence == uavf::GeotagConfidence::interpolated) {
      gj["position"] = ordered_json{{"lat_deg", g.position.lat_deg},
                                    {"lon_deg", g.position.lon_deg},
                                    {"alt_m", g.position.alt_m ? json(*g.position.alt_m)
                                                               : json(nullptr)}};
      gj["sample_gap_s"] = g.sample_gap_s;
    }
    list.push_back(std::move(gj));
  }
  ordered_json j{{"alignment_source", align->source},
                 {"manifest_source", manifest_note},
                 {"camera_offset_s", align->camera_offset_s},
                 {"geotags", std::move(list)},
                 {"uncorrelatable", manifest->uncorrelatable}};
  const fs::path out = out_dir(opt) / "geotags.json";
  write_file(out, j.dump(2) + "\n");
  std::cout << tags.size() << " media entr(ies) correlated (" << align->source << ") -> "
            << out.string() << "\n";
  return kExitOk;
}

int cmd_report(const Options& opt) {
  const fs::path case_dir(opt.case_dir);
  uavf::ReportInputs inputs;

  const fs::path manifest_path = case_dir / "manifest.json";
  if (fs::exists(manifest_path)) {
    inputs.manifest = uavf::parse_manifest(read_file(manifest_path));
    inputs.verification = uavf::verify_manifest(*inputs.manifest, case_dir);
    for (const auto& [id, status] : inputs.verification) {
      if (status != uavf::VerifyStatus::ok) {
        inputs.data_quality.push_back("custody: item '" + id + "' is " +
                                      uavf::to_string(status));
      }
    }
  } else {
    inputs.absent_reasons["case"] = "no manifest.json (run `uavf ingest` first)";
  }

  if (auto components = load_components(opt); !components.empty()) {
    inputs.components = std::move(components);
  }

  std::string log_id = "flight";
  std::optional<uavf::ulog::FlightLog> log;
  try {
    log = load_first_log(opt, &log_id);
  } catch (const uavf::Error& e) {
    inputs.absent_reasons["flight"] = std::string("flight log unreadable: ") + e.what();
    inputs.data_quality.push_back(std::string("flight log unreadable: ") + e.what());
  }

  std::optional<uavf::Trajectory> traj;
  if (log) {
    inputs.findings = uavf::analyze_parameters(log->parameters, load_catalog(opt));
    try {
      traj = uavf::build_trajectory(*log);
      inputs.flight = uavf::flight_summary(*log, traj.value());
    } catch (const uavf::TrackError& e) {
      inputs.absent_reasons["flight"] = e.what();
    }
    for (const auto& d : log->dropouts) {
      inputs.data_quality.push_back("dropout at t=" + std::to_string(d.timestamp_us / 1000000.0) +
                                    " s lasting " + std::to_string(d.duration_ms) + " ms");
    }
    if (log->quality.truncated) {
      inputs.data_quality.push_back("flight log truncated/partial; salvaged data only");
    }
    for (const auto& n : log->quality.notes) inputs.data_quality.push_back("log: " + n);
  } else if (!inputs.absent_reasons.count("flight")) {
    inputs.absent_reasons["parameters"] = "no flight log";
  }

  std::optional<uavf::MissionPlan> plan;
  try {
    plan = load_plan(opt);
  } catch (const uavf::Error& e) {
    inputs.absent_reasons["mission"] = std::string("mission plan unreadable: ") + e.what();
  }
  if (plan) {
    uavf::MissionSection section;
    const auto summary = uavf::mission_summary(*plan);
    section.narrative = summary.narrative;
    section.polyline = summary.polyline;
    if (traj) {
      section.deviation = uavf::compare_plan_to_track(*plan, *traj, opt.reach_radius_m);
    }
    inputs.mission = std::move(section);
  }

  if (auto battery = load_battery_doc(opt)) {
    std::optional<double> cruise = battery->cruise_mps;
    std::vector<std::string> range_notes;
    if (!cruise && opt.cruise_mps > 0) cruise = opt.cruise_mps;
    if (!cruise && log) {
      cruise = uavf::cruise_speed_mps(log->parameters);
      if (cruise) {
        range_notes.push_back("cruise speed taken from autopilot parameter MPC_XY_CRUISE");
      }
    }
    if (cruise) {
      const auto model = uavf::make_power_model(battery->per_motor_w, battery->motor_count,
                                                battery->avionics_w, *cruise);
      auto est = uavf::estimate_range(battery->spec, battery->obs, model);
      if (battery->empty_v_defaulted) {
        est.assumptions.push_back("empty voltage not supplied; toolkit default used");
      }
      est.assumptions.insert(est.assumptions.end(), range_notes.begin(), range_notes.end());
      inputs.range = std::move(est);
    } else {
      inputs.absent_reasons["range"] =
          "battery observed but no cruise speed available (document, --cruise-mps or log)";
    }
  }

  std::string manifest_note;
  if (auto media = load_media_manifest(opt, &manifest_note)) {
    auto align = resolve_alignment(opt, log ? &*log : nullptr);
    if (!align) {
      inputs.absent_reasons["media"] = "media present but no clock alignment available";
    } else if (!traj) {
      inputs.absent_reasons["media"] = "media present but no trajectory to correlate against";
    } else {
      inputs.media = uavf::geotag(*media, *traj, *align);
      inputs.data_quality.push_back("media alignment: " + align->source);
      for (const auto& u : media->uncorrelatable) {
        inputs.data_quality.push_back("media '" + u + "' has no usable timestamp");
      }
    }
  }

  const auto report = uavf::build_report(std::move(inputs));
  const fs::path base = out_dir(opt);
  write_file(base / "report.json", uavf::render_json(report));
  write_file(base / "report.md", uavf::render_markdown(report));

  if (traj) {
    std::optional<std::vector<uavf::GeoPoint>> planned;
    if (plan) planned = uavf::mission_summary(*plan).polyline;
    std::vector<uavf::Placemark> marks;
    if (report.media) {
      for (const auto& g : *report.media) {
        if (g.confidence == uavf::GeotagConfidence::interpolated) {
          marks.push_back({g.file, g.position});
        }
      }
    }
    write_file(base / (log_id + ".track.geojson"),
               uavf::export_geojson(*traj, planned ? &*planned : nullptr,
                                    marks.empty() ? nullptr : &marks));
    write_file(base / (log_id + ".track.kml"),
               uavf::export_kml(*traj, marks.empty() ? nullptr : &marks));
  }

  std::cout << "report -> " << (base / "report.json").string() << ", "
            << (base / "report.md").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uavf — forensic analysis of recovered UAV flight evidence"};
  app.set_version_flag("--version", std::string(uavf::kToolkitVersion));
  app.require_subcommand(1);

  Options opt;

  auto add_common = [&opt](CLI::App* cmd, bool case_required) {
    auto* o = cmd->add_option("--case", opt.case_dir, "case directory (case/<kind>/<files>)");
    if (case_required) o->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--out", opt.out_dir, "output directory (default <case>/analysis)");
  };

  auto* ingest = app.add_subcommand("ingest", "hash evidence files into the case manifest");
  add_common(ingest, true);
  ingest->add_option("--case-id", opt.case_id, "case identifier (default directory name)");
  ingest->add_option("--notes", opt.notes, "free-text acquisition notes");
  ingest->add_flag("--verify", opt.verify, "verify an existing manifest instead of ingesting");

  auto* logc = app.add_subcommand("log", "parse flight logs and write decoded summaries");
  add_common(logc, true);

  auto* params = app.add_subcommand("params", "analyze parameters against the finding catalog");
  add_common(params, true);
  params->add_option("--catalog", opt.catalog_path, "finding catalog JSON (default embedded)")
      ->check(CLI::ExistingFile);

  auto* mission = app.add_subcommand("mission", "decode mission plan and compare to track");
  add_common(mission, true);
  mission->add_option("--reach-radius", opt.reach_radius_m, "waypoint reach radius in meters");

  auto* track = app.add_subcommand("track", "reconstruct trajectory and export GeoJSON/KML");
  add_common(track, true);

  auto* range = app.add_subcommand("range", "battery-based endurance and range estimate");
  add_common(range, false);
  range->add_option("--capacity-mah", opt.capacity_mah, "battery capacity in mAh");
  range->add_option("--full-v", opt.full_v, "full-charge voltage");
  range->add_option("--empty-v", opt.empty_v, "linear-model zero-capacity voltage");
  range->add_option("--observed-v", opt.observed_v, "voltage observed at recovery");
  range->add_option("--motor-w", opt.motor_w, "per-motor cruise power in W");
  range->add_option("--motors", opt.motors, "motor count");
  range->add_option("--avionics-w", opt.avionics_w, "avionics/telemetry power in W");
  range->add_option("--cruise-mps", opt.cruise_mps, "average cruise speed in m/s");

  auto* media = app.add_subcommand("media", "geotag camera media against the trajectory");
  add_common(media, true);
  media->add_option("--log-epoch", opt.log_epoch, "UTC instant of log t=0 (RFC 3339)");
  media->add_option("--camera-offset-s", opt.camera_offset_s,
                    "seconds added to camera timestamps");

  auto* report = app.add_subcommand("report", "assemble the consolidated forensic report");
  add_common(report, true);
  report->add_option("--catalog", opt.catalog_path, "finding catalog JSON (default embedded)")
      ->check(CLI::ExistingFile);
  report->add_option("--reach-radius", opt.reach_radius_m, "waypoint reach radius in meters");
  report->add_option("--log-epoch", opt.log_epoch, "UTC instant of log t=0 (RFC 3339)");
  report->add_option("--camera-offset-s", opt.camera_offset_s,
                     "seconds added to camera timestamps");
  report->add_option("--cruise-mps", opt.cruise_mps, "cruise speed override for range estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;  // help is success, the rest is usage
  }

  try {
    if (*ingest) return cmd_ingest(opt);
    if (*logc) return cmd_log(opt);
    if (*params) return cmd_params(opt);
    if (*mission) return cmd_mission(opt);
    if (*track) return cmd_track(opt);
    if (*range) {
      const bool flags_given = opt.capacity_mah > 0 && opt.full_v > 0 && opt.observed_v > 0 &&
                               opt.motor_w > 0 && opt.cruise_mps > 0;
      if (!flags_given && opt.case_dir.empty()) {
        std::cerr << "range needs either --case or the full flag set\n";
        return kExitUsage;
      }
      if (!flags_given && !fs::is_directory(opt.case_dir)) {
        std::cerr << "case directory does not exist: " << opt.case_dir << "\n";
        return kExitUsage;
      }
      return cmd_range(opt, flags_given);
    }
    if (*media) return cmd_media(opt);
    if (*report) return cmd_report(opt);
  } catch (const uavf::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const uavf::Error& e) {
    std::cerr << "evidence error: " << e.what() << "\n";
    return kExitEvidence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEvidence;
  }
  return kExitUsage;
}
