#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavf/track.hpp"

namespace uavf {

/// A point of interest overlaid on the track (geotagged media, markers).
struct Placemark {
  std::string name;
  GeoPoint position;
};

namespace geo_detail {

inline nlohmann::ordered_json coord_json(const GeoPoint& p) {
  // GeoJSON order: lon, lat, alt.
  nlohmann::ordered_json c = nlohmann::ordered_json::array({p.lon_deg, p.lat_deg});
  if (p.alt_m) c.push_back(*p.alt_m);
  return c;
}

/// Compact number rendering for KML ("10" not "10.000000").
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string kml_coord(const GeoPoint& p) {
  return num(p.lon_deg) + "," + num(p.lat_deg) + "," + num(p.alt_m ? *p.alt_m : 0.0);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace geo_detail

/// RFC 7946 FeatureCollection: the flown LineString (role "flown"), an
/// optional planned polyline (role "planned"), takeoff/last-point markers
/// and optional media placemarks.
inline std::string export_geojson(const Trajectory& traj,
                                  const std::vector<GeoPoint>* planned = nullptr,
                                  const std::vector<Placemark>* media = nullptr) {
  using nlohmann::ordered_json;
  if (traj.samples.empty()) throw TrackError("cannot export an empty trajectory");

  ordered_json features = ordered_json::array();

  ordered_json flown_coords = ordered_json::array();
  for (const auto& s : traj.samples) flown_coords.push_back(geo_detail::coord_json(s.position));
  features.push_back(ordered_json{
      {"type", "Feature"},
      {"properties", {{"role", "flown"}, {"source", traj.source_note}}},
      {"geometry", {{"type", "LineString"}, {"coordinates", std::move(flown_coords)}}},
  });

  if (planned && !planned->empty()) {
    ordered_json planned_coords = ordered_json::array();
    for (const auto& p : *planned) planned_coords.push_back(geo_detail::coord_json(p));
    features.push_back(ordered_json{
        {"type", "Feature"},
        {"properties", {{"role", "planned"}}},
        {"geometry", {{"type", "LineString"}, {"coordinates", std::move(planned_coords)}}},
    });
  }

  auto point_feature = [](const char* role, const GeoPoint& p, const std::string& name) {
    ordered_json props{{"role", role}};
    if (!name.empty()) props["name"] = name;
    return ordered_json{
        {"type", "Feature"},
        {"properties", std::move(props)},
        {"geometry", {{"type", "Point"}, {"coordinates", geo_detail::coord_json(p)}}},
    };
  };
  features.push_back(point_feature("takeoff", traj.samples.front().position, ""));
  features.push_back(point_feature("last-point", traj.samples.back().position, ""));
  if (media) {
    for (const auto& m : *media) features.push_back(point_feature("media", m.position, m.name));
  }

  ordered_json doc{{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump(2) + "\n";
}

/// KML 2.2 with one LineString Placemark (altitude mode absolute) and
/// optional media placemark points.
inline std::string export_kml(const Trajectory& traj,
                              const std::vector<Placemark>* media = nullptr) {
  using geo_detail::kml_coord;
  using geo_detail::xml_escape;
  if (traj.samples.empty()) throw TrackError("cannot export an empty trajectory");

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n";
  out += "  <Document>\n";
  out += "    <name>Reconstructed flight track</name>\n";
  out += "    <Placemark>\n";
  out += "      <name>flown</name>\n";
  out += "      <description>" + xml_escape(traj.source_note) + "</description>\n";
  out += "      <LineString>\n";
  out += "        <altitudeMode>absolute</altitudeMode>\n";
  out += "        <coordinates>\n";
  for (const auto& s : traj.samples) {
    out += "          " + kml_coord(s.position) + "\n";
  }
  out += "        </coordinates>\n";
  out += "      </LineString>\n";
  out += "    </Placemark>\n";
  if (media) {
    for (const auto& m : *media) {
      out += "    <Placemark>\n";
      out += "      <name>" + xml_escape(m.name) + "</name>\n";
      out += "      <Point>\n";
      out += "        <altitudeMode>absolute</altitudeMode>\n";
      out += "        <coordinates>" + kml_coord(m.position) + "</coordinates>\n";
      out += "      </Point>\n";
      out += "    </Placemark>\n";
    }
  }
  out += "  </Document>\n";
  out += "</kml>\n";
  return out;
}

}  // namespace uavf
