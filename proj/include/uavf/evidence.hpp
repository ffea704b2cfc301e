#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavf/errors.hpp"
#include "uavf/time.hpp"

namespace uavf {

// ---------------------------------------------------------------------------
// Hashing

/// Lowercase-hex SHA-256 of a byte buffer (OpenSSL EVP).
inline std::string sha256_hex(const void* data, std::size_t len) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, data, len);
  EVP_DigestFinal_ex(ctx, digest, &digest_len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(digest_len * 2);
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

inline std::string sha256_hex(const std::vector<std::uint8_t>& bytes) {
  return sha256_hex(bytes.data(), bytes.size());
}

/// Streaming file hash; the file is opened read-only and its bytes are
/// never touched.
inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open evidence file", path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.good()) {
    in.read(buf, sizeof buf);
    std::streamsize got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got));
  }
  if (in.bad()) {
    EVP_MD_CTX_free(ctx);
    throw IngestError("read failure while hashing", path.string());
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int digest_len = 0;
  EVP_DigestFinal_ex(ctx, digest, &digest_len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < digest_len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Evidence data model

enum class EvidenceKind {
  flight_log,
  mission_plan,
  parameter_dump,
  battery_observation,
  media_manifest,
  component_record,
  other,
};

inline const char* to_string(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::flight_log: return "flight_log";
    case EvidenceKind::mission_plan: return "mission_plan";
    case EvidenceKind::parameter_dump: return "parameter_dump";
    case EvidenceKind::battery_observation: return "battery_observation";
    case EvidenceKind::media_manifest: return "media_manifest";
    case EvidenceKind::component_record: return "component_record";
    case EvidenceKind::other: return "other";
  }
  return "other";
}

inline EvidenceKind evidence_kind_from_string(const std::string& s) {
  for (EvidenceKind k : {EvidenceKind::flight_log, EvidenceKind::mission_plan,
                         EvidenceKind::parameter_dump, EvidenceKind::battery_observation,
                         EvidenceKind::media_manifest, EvidenceKind::component_record,
                         EvidenceKind::other}) {
    if (s == to_string(k)) return k;
  }
  throw DocumentError("unknown evidence kind: " + s, "kind");
}

/// One acquired file. The kind is fixed at ingest time and never guessed
/// afterwards; the digest pins the content as of acquisition.
struct EvidenceItem {
  std::string item_id;
  EvidenceKind kind = EvidenceKind::other;
  std::string source_path;
  std::string sha256;  // lowercase hex, 64 chars
  UtcTime acquired_at;

  bool operator==(const EvidenceItem&) const = default;
};

enum class ComponentType {
  frame, motor, esc, propeller, battery, autopilot, gps,
  radio_receiver, telemetry, camera, other,
};

inline const char* to_string(ComponentType c) {
  switch (c) {
    case ComponentType::frame: return "frame";
    case ComponentType::motor: return "motor";
    case ComponentType::esc: return "esc";
    case ComponentType::propeller: return "propeller";
    case ComponentType::battery: return "battery";
    case ComponentType::autopilot: return "autopilot";
    case ComponentType::gps: return "gps";
    case ComponentType::radio_receiver: return "radio_receiver";
    case ComponentType::telemetry: return "telemetry";
    case ComponentType::camera: return "camera";
    case ComponentType::other: return "other";
  }
  return "other";
}

inline ComponentType component_type_from_string(const std::string& s) {
  for (ComponentType c : {ComponentType::frame, ComponentType::motor, ComponentType::esc,
                          ComponentType::propeller, ComponentType::battery,
                          ComponentType::autopilot, ComponentType::gps,
                          ComponentType::radio_receiver, ComponentType::telemetry,
                          ComponentType::camera, ComponentType::other}) {
    if (s == to_string(c)) return c;
  }
  throw DocumentError("unknown component type: " + s, "component");
}

/// Physical component inventory entry. This is manually recorded metadata
/// from the bench examination; the toolkit records it, never infers it.
struct ComponentRecord {
  ComponentType component = ComponentType::other;
  std::string description;
  std::optional<std::string> serial_number;
  std::optional<double> mass_g;
  std::optional<double> dimension_cm;

  bool operator==(const ComponentRecord&) const = default;
};

inline ComponentRecord make_component_record(ComponentType type, std::string description,
                                             std::optional<std::string> serial = {},
                                             std::optional<double> mass_g = {},
                                             std::optional<double> dimension_cm = {}) {
  if (mass_g && *mass_g <= 0.0) throw ValidationError("component mass_g must be > 0");
  if (dimension_cm && *dimension_cm <= 0.0) throw ValidationError("component dimension_cm must be > 0");
  return ComponentRecord{type, std::move(description), std::move(serial), mass_g, dimension_cm};
}

/// The acquisition-phase record: everything taken into custody, hashed.
/// Items are kept ordered by item_id so assembly is deterministic.
struct CaseManifest {
  std::string case_id;
  UtcTime created_at;
  std::vector<EvidenceItem> items;
  std::string notes;

  bool operator==(const CaseManifest&) const = default;

  void add_item(EvidenceItem item) {
    auto pos = std::lower_bound(items.begin(), items.end(), item,
                                [](const EvidenceItem& a, const EvidenceItem& b) {
                                  return a.item_id < b.item_id;
                                });
    if (pos != items.end() && pos->item_id == item.item_id) {
      throw ValidationError("duplicate evidence item_id: " + item.item_id);
    }
    items.insert(pos, std::move(item));
  }

  const EvidenceItem* find(const std::string& item_id) const {
    for (const auto& it : items) {
      if (it.item_id == item_id) return &it;
    }
    return nullptr;
  }
};

inline CaseManifest make_case_manifest(std::string case_id, UtcTime created_at,
                                       std::string notes = "") {
  if (case_id.empty()) throw ValidationError("case_id must be non-empty");
  return CaseManifest{std::move(case_id), created_at, {}, std::move(notes)};
}

// ---------------------------------------------------------------------------
// Operations

/// Reads and hashes a file, producing an evidence item. Read-only: the file
/// content is never modified. item_id defaults to "<kind>/<filename>".
inline EvidenceItem ingest_evidence(const std::filesystem::path& path, EvidenceKind kind,
                                    std::string item_id = "") {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec) || ec) {
    throw IngestError("evidence file does not exist", path.string());
  }
  EvidenceItem item;
  item.item_id = item_id.empty()
                     ? std::string(to_string(kind)) + "/" + path.filename().string()
                     : std::move(item_id);
  item.kind = kind;
  item.source_path = path.string();
  item.sha256 = sha256_file(path);
  item.acquired_at = now_utc();
  return item;
}

enum class VerifyStatus { ok, hash_mismatch, missing };

inline const char* to_string(VerifyStatus s) {
  switch (s) {
    case VerifyStatus::ok: return "ok";
    case VerifyStatus::hash_mismatch: return "hash_mismatch";
    case VerifyStatus::missing: return "missing";
  }
  return "missing";
}

/// Re-hashes every item and reports its custody status. Relative source
/// paths are resolved against base_dir. Missing or altered files are
/// statuses, not errors: absence of evidence is itself a finding.
inline std::vector<std::pair<std::string, VerifyStatus>> verify_manifest(
    const CaseManifest& manifest, const std::filesystem::path& base_dir = {}) {
  std::vector<std::pair<std::string, VerifyStatus>> out;
  out.reserve(manifest.items.size());
  for (const auto& item : manifest.items) {
    std::filesystem::path p{item.source_path};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    std::error_code ec;
    if (!std::filesystem::exists(p, ec) || ec) {
      out.emplace_back(item.item_id, VerifyStatus::missing);
      continue;
    }
    std::string digest;
    try {
      digest = sha256_file(p);
    } catch (const IngestError&) {
      out.emplace_back(item.item_id, VerifyStatus::missing);
      continue;
    }
    out.emplace_back(item.item_id,
                     digest == item.sha256 ? VerifyStatus::ok : VerifyStatus::hash_mismatch);
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON persistence (schema: schema/manifest.schema.json)

inline nlohmann::ordered_json to_json(const EvidenceItem& item) {
  return nlohmann::ordered_json{
      {"item_id", item.item_id},
      {"kind", to_string(item.kind)},
      {"source_path", item.source_path},
      {"sha256", item.sha256},
      {"acquired_at", render_rfc3339(item.acquired_at)},
  };
}

inline EvidenceItem evidence_item_from_json(const nlohmann::json& j) {
  EvidenceItem item;
  item.item_id = j.at("item_id").get<std::string>();
  item.kind = evidence_kind_from_string(j.at("kind").get<std::string>());
  item.source_path = j.at("source_path").get<std::string>();
  item.sha256 = j.at("sha256").get<std::string>();
  item.acquired_at = parse_rfc3339(j.at("acquired_at").get<std::string>());
  return item;
}

inline nlohmann::ordered_json to_json(const ComponentRecord& rec) {
  nlohmann::ordered_json j{
      {"component", to_string(rec.component)},
      {"description", rec.description},
  };
  if (rec.serial_number) j["serial_number"] = *rec.serial_number;
  if (rec.mass_g) j["mass_g"] = *rec.mass_g;
  if (rec.dimension_cm) j["dimension_cm"] = *rec.dimension_cm;
  return j;
}

inline ComponentRecord component_record_from_json(const nlohmann::json& j) {
  ComponentRecord rec;
  rec.component = component_type_from_string(j.at("component").get<std::string>());
  rec.description = j.value("description", "");
  if (j.contains("serial_number")) rec.serial_number = j["serial_number"].get<std::string>();
  if (j.contains("mass_g")) rec.mass_g = j["mass_g"].get<double>();
  if (j.contains("dimension_cm")) rec.dimension_cm = j["dimension_cm"].get<double>();
  if (rec.mass_g && *rec.mass_g <= 0.0) throw DocumentError("mass_g must be > 0", "mass_g");
  if (rec.dimension_cm && *rec.dimension_cm <= 0.0) {
    throw DocumentError("dimension_cm must be > 0", "dimension_cm");
  }
  return rec;
}

inline nlohmann::ordered_json to_json(const CaseManifest& m) {
  nlohmann::ordered_json items = nlohmann::ordered_json::array();
  for (const auto& item : m.items) items.push_back(to_json(item));
  return nlohmann::ordered_json{
      {"case_id", m.case_id},
      {"created_at", render_rfc3339(m.created_at)},
      {"notes", m.notes},
      {"items", std::move(items)},
  };
}

inline CaseManifest case_manifest_from_json(const nlohmann::json& j) {
  CaseManifest m = make_case_manifest(j.at("case_id").get<std::string>(),
                                      parse_rfc3339(j.at("created_at").get<std::string>()),
                                      j.value("notes", ""));
  for (const auto& ij : j.at("items")) m.add_item(evidence_item_from_json(ij));
  return m;
}

inline std::string render_manifest(const CaseManifest& m) { return to_json(m).dump(2) + "\n"; }

inline CaseManifest parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("manifest is not valid JSON: ") + e.what(), "$");
  }
  try {
    return case_manifest_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("manifest field error: ") + e.what(), "$");
  }
}

}  // namespace uavf
