#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavf/errors.hpp"
#include "uavf/evidence.hpp"
#include "uavf/exif.hpp"
#include "uavf/geo.hpp"
#include "uavf/time.hpp"
#include "uavf/track.hpp"

namespace uavf {

/// Out-of-range interpolation request; carries the valid log-time window.
class TimeRangeError : public Error {
 public:
  TimeRangeError(std::int64_t t_us, std::uint64_t first_us, std::uint64_t last_us)
      : Error("time " + std::to_string(t_us) + " us outside trajectory window [" +
              std::to_string(first_us) + ", " + std::to_string(last_us) + "]"),
        first_us_(first_us),
        last_us_(last_us) {}
  std::uint64_t first_us() const { return first_us_; }
  std::uint64_t last_us() const { return last_us_; }

 private:
  std::uint64_t first_us_;
  std::uint64_t last_us_;
};

struct MediaEntry {
  std::string file;
  UtcTime capture_time;
  std::string sha256;

  bool operator==(const MediaEntry&) const = default;
};

/// Camera media inventory. Files without a usable capture timestamp are
/// listed as uncorrelatable rather than guessed at.
struct MediaManifest {
  std::vector<MediaEntry> entries;
  std::vector<std::string> uncorrelatable;

  bool operator==(const MediaManifest&) const = default;
};

inline void validate_media_manifest(const MediaManifest& m) {
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < m.entries.size(); ++j) {
      if (m.entries[i].file == m.entries[j].file) {
        throw ValidationError("duplicate media file name: " + m.entries[i].file);
      }
    }
  }
}

/// Maps camera wall-clock time onto the log's power-on clock. Always an
/// explicit investigator input (or derived from a GPS-UTC sample and
/// reported as such) — silent auto-alignment would fabricate evidence.
struct ClockAlignment {
  UtcTime log_epoch_utc;      // UTC instant of log t = 0
  double camera_offset_s = 0; // added to camera timestamps
  std::string source = "investigator-supplied";
};

enum class GeotagConfidence { interpolated, extrapolation_refused, out_of_flight };

inline const char* to_string(GeotagConfidence c) {
  switch (c) {
    case GeotagConfidence::interpolated: return "interpolated";
    case GeotagConfidence::extrapolation_refused: return "extrapolation_refused";
    case GeotagConfidence::out_of_flight: return "out_of_flight";
  }
  return "out_of_flight";
}

struct GeotagResult {
  std::string file;
  GeoPoint position;  // meaningful only when confidence == interpolated
  std::int64_t t_log_us = 0;
  GeotagConfidence confidence = GeotagConfidence::out_of_flight;
  double sample_gap_s = 0.0;  // spacing of the bracketing samples (quality hint)
};

// ---------------------------------------------------------------------------
// Interpolation

/// Position at a log time by linear interpolation between the bracketing
/// samples. Exact sample hits return that sample's position. Refuses to
/// extrapolate outside [first, last].
inline GeoPoint position_at(const Trajectory& traj, std::uint64_t t_us) {
  const auto& s = traj.samples;
  if (s.size() < 2) {
    throw TrackError("interpolation requires at least 2 trajectory samples");
  }
  if (t_us < s.front().t_us || t_us > s.back().t_us) {
    throw TimeRangeError(static_cast<std::int64_t>(t_us), s.front().t_us, s.back().t_us);
  }
  std::size_t lo = 0, hi = s.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (s[mid].t_us <= t_us) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (s[lo].t_us == t_us) return s[lo].position;
  if (s[hi].t_us == t_us) return s[hi].position;
  const double f = static_cast<double>(t_us - s[lo].t_us) /
                   static_cast<double>(s[hi].t_us - s[lo].t_us);
  const GeoPoint& a = s[lo].position;
  const GeoPoint& b = s[hi].position;
  GeoPoint out;
  out.lat_deg = a.lat_deg + f * (b.lat_deg - a.lat_deg);
  out.lon_deg = a.lon_deg + f * (b.lon_deg - a.lon_deg);
  if (a.alt_m && b.alt_m) out.alt_m = *a.alt_m + f * (*b.alt_m - *a.alt_m);
  return out;
}

// ---------------------------------------------------------------------------
// Geotagging

/// Maps every manifest entry onto the trajectory: one result per entry,
/// statuses instead of omissions. Entries outside the flight window are
/// out_of_flight; positions are never extrapolated.
inline std::vector<GeotagResult> geotag(const MediaManifest& manifest, const Trajectory& traj,
                                        const ClockAlignment& align) {
  std::vector<GeotagResult> out;
  out.reserve(manifest.entries.size());
  const bool degenerate = traj.samples.size() < 2;
  for (const auto& entry : manifest.entries) {
    GeotagResult r;
    r.file = entry.file;
    const std::int64_t mapped_utc_us =
        entry.capture_time.us_since_epoch +
        static_cast<std::int64_t>(align.camera_offset_s * 1e6);
    r.t_log_us = mapped_utc_us - align.log_epoch_utc.us_since_epoch;
    if (degenerate) {
      r.confidence = GeotagConfidence::extrapolation_refused;
      out.push_back(std::move(r));
      continue;
    }
    const std::uint64_t first = traj.samples.front().t_us;
    const std::uint64_t last = traj.samples.back().t_us;
    if (r.t_log_us < 0 || static_cast<std::uint64_t>(r.t_log_us) < first ||
        static_cast<std::uint64_t>(r.t_log_us) > last) {
      r.confidence = GeotagConfidence::out_of_flight;
      out.push_back(std::move(r));
      continue;
    }
    const std::uint64_t t = static_cast<std::uint64_t>(r.t_log_us);
    r.position = position_at(traj, t);
    r.confidence = GeotagConfidence::interpolated;
    // Inter-sample spacing at the mapped time, the qualitative error bound.
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
      if (traj.samples[i].t_us >= t) {
        r.sample_gap_s =
            static_cast<double>(traj.samples[i].t_us - traj.samples[i - 1].t_us) / 1e6;
        break;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

/// Derives the UTC instant of log t = 0 from a GPS time sample when the
/// log carries one (vehicle_gps_position.time_utc_usec).
inline std::optional<ClockAlignment> derive_alignment_from_gps(const ulog::FlightLog& log) {
  const ulog::TimeSeries* gps = log.find_series("vehicle_gps_position", 0);
  if (!gps) return std::nullopt;
  auto col = gps->column_index("time_utc_usec");
  if (!col) return std::nullopt;
  for (std::size_t i = 0; i < gps->rows.size(); ++i) {
    const double utc_us = gps->value(i, *col);
    if (utc_us > 0) {
      ClockAlignment align;
      align.log_epoch_utc =
          UtcTime{static_cast<std::int64_t>(utc_us) -
                  static_cast<std::int64_t>(gps->timestamp(i))};
      align.camera_offset_s = 0.0;
      align.source = "derived from vehicle_gps_position.time_utc_usec";
      return align;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Manifest JSON and directory scan

inline nlohmann::ordered_json to_json(const MediaManifest& m) {
  nlohmann::ordered_json entries = nlohmann::ordered_json::array();
  for (const auto& e : m.entries) {
    entries.push_back(nlohmann::ordered_json{
        {"file", e.file},
        {"capture_time", render_rfc3339(e.capture_time)},
        {"sha256", e.sha256},
    });
  }
  return nlohmann::ordered_json{{"entries", std::move(entries)},
                                {"uncorrelatable", m.uncorrelatable}};
}

inline MediaManifest media_manifest_from_json(const nlohmann::json& j) {
  MediaManifest m;
  for (const auto& ej : j.at("entries")) {
    MediaEntry e;
    e.file = ej.at("file").get<std::string>();
    e.capture_time = parse_rfc3339(ej.at("capture_time").get<std::string>());
    e.sha256 = ej.value("sha256", "");
    m.entries.push_back(std::move(e));
  }
  if (j.contains("uncorrelatable")) {
    for (const auto& u : j["uncorrelatable"]) m.uncorrelatable.push_back(u.get<std::string>());
  }
  validate_media_manifest(m);
  return m;
}

inline MediaManifest parse_media_manifest(const std::string& text) {
  try {
    return media_manifest_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("media manifest error: ") + e.what(), "$");
  }
}

/// Builds a manifest from a directory of images: hashes each file and pulls
/// the EXIF capture time. Files without one go to the uncorrelatable list.
inline MediaManifest build_media_manifest(const std::filesystem::path& dir) {
  MediaManifest m;
  std::vector<std::filesystem::path> files;
  for (const auto& de : std::filesystem::directory_iterator(dir)) {
    if (de.is_regular_file()) files.push_back(de.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto t = exif_capture_time_file(f);
    if (!t) {
      m.uncorrelatable.push_back(f.filename().string());
      continue;
    }
    MediaEntry e;
    e.file = f.filename().string();
    e.capture_time = *t;
    e.sha256 = sha256_file(f);
    m.entries.push_back(std::move(e));
  }
  validate_media_manifest(m);
  return m;
}

}  // namespace uavf
