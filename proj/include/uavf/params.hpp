#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavf/errors.hpp"
#include "uavf/ulog.hpp"

namespace uavf {

// Parameter findings: turns a raw autopilot parameter dump into the
// failsafe/safety posture an investigator reads. The rules live in a
// versioned catalog (data, not code) so they can be extended per firmware
// without rebuilding the toolkit.

enum class Severity { info, notable, critical };

inline const char* to_string(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::notable: return "notable";
    case Severity::critical: return "critical";
  }
  return "info";
}

inline Severity severity_from_string(const std::string& s) {
  if (s == "info") return Severity::info;
  if (s == "notable") return Severity::notable;
  if (s == "critical") return Severity::critical;
  throw DocumentError("unknown severity: " + s, "severity");
}

struct Finding {
  std::string code;
  Severity severity = Severity::info;
  std::string parameter;
  std::string observed;  // rendered value
  std::string meaning;

  bool operator==(const Finding&) const = default;
};

enum class RuleOp { eq, ne, lt, le, gt, ge, present };

inline const char* to_string(RuleOp op) {
  switch (op) {
    case RuleOp::eq: return "eq";
    case RuleOp::ne: return "ne";
    case RuleOp::lt: return "lt";
    case RuleOp::le: return "le";
    case RuleOp::gt: return "gt";
    case RuleOp::ge: return "ge";
    case RuleOp::present: return "present";
  }
  return "eq";
}

inline RuleOp rule_op_from_string(const std::string& s) {
  if (s == "eq") return RuleOp::eq;
  if (s == "ne") return RuleOp::ne;
  if (s == "lt") return RuleOp::lt;
  if (s == "le") return RuleOp::le;
  if (s == "gt") return RuleOp::gt;
  if (s == "ge") return RuleOp::ge;
  if (s == "present") return RuleOp::present;
  throw DocumentError("unknown rule op: " + s, "when.op");
}

/// One catalog rule: fires when the named parameter is present and its
/// latest value satisfies the predicate. "{value}" in the meaning template
/// expands to the observed value.
struct FindingRule {
  std::string code;
  std::string parameter;
  Severity severity = Severity::info;
  RuleOp op = RuleOp::present;
  double value = 0.0;  // unused for present
  std::string meaning;

  bool operator==(const FindingRule&) const = default;
};

struct FindingCatalog {
  std::string name;
  int version = 1;
  std::vector<FindingRule> rules;

  bool operator==(const FindingCatalog&) const = default;
};

inline void validate_catalog(const FindingCatalog& catalog) {
  for (std::size_t i = 0; i < catalog.rules.size(); ++i) {
    const FindingRule& r = catalog.rules[i];
    if (r.code.empty()) throw ValidationError("catalog rule with empty code");
    if (r.parameter.empty()) throw ValidationError("rule '" + r.code + "' names no parameter");
    if (r.meaning.empty()) throw ValidationError("rule '" + r.code + "' has empty meaning");
    for (std::size_t j = i + 1; j < catalog.rules.size(); ++j) {
      if (catalog.rules[j].code == r.code) {
        throw ValidationError("duplicate rule code: " + r.code);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Catalog JSON (schema: schema/catalog.schema.json)

inline FindingCatalog catalog_from_json(const nlohmann::json& j) {
  FindingCatalog catalog;
  catalog.name = j.value("catalog", "unnamed");
  catalog.version = j.value("version", 1);
  for (const auto& rj : j.at("rules")) {
    FindingRule rule;
    rule.code = rj.at("code").get<std::string>();
    rule.parameter = rj.at("parameter").get<std::string>();
    rule.severity = severity_from_string(rj.at("severity").get<std::string>());
    const auto& when = rj.at("when");
    rule.op = rule_op_from_string(when.at("op").get<std::string>());
    if (rule.op != RuleOp::present) rule.value = when.at("value").get<double>();
    rule.meaning = rj.at("meaning").get<std::string>();
    catalog.rules.push_back(std::move(rule));
  }
  validate_catalog(catalog);
  return catalog;
}

inline FindingCatalog parse_catalog(const std::string& text) {
  try {
    return catalog_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("catalog document error: ") + e.what(), "$");
  }
}

inline nlohmann::ordered_json to_json(const FindingCatalog& catalog) {
  nlohmann::ordered_json rules = nlohmann::ordered_json::array();
  for (const auto& r : catalog.rules) {
    nlohmann::ordered_json when{{"op", to_string(r.op)}};
    if (r.op != RuleOp::present) when["value"] = r.value;
    rules.push_back(nlohmann::ordered_json{
        {"code", r.code},
        {"parameter", r.parameter},
        {"severity", to_string(r.severity)},
        {"when", std::move(when)},
        {"meaning", r.meaning},
    });
  }
  return nlohmann::ordered_json{
      {"catalog", catalog.name}, {"version", catalog.version}, {"rules", std::move(rules)}};
}

/// Built-in rule set covering the PX4 failsafe and safety parameters this
/// toolkit reports on. Also shipped at catalogs/px4-default.json.
inline const FindingCatalog& default_catalog() {
  static const FindingCatalog catalog = [] {
    FindingCatalog c;
    c.name = "px4-default";
    c.version = 1;
    auto rule = [&c](const char* code, const char* param, Severity sev, RuleOp op,
                     double value, const char* meaning) {
      c.rules.push_back(FindingRule{code, param, sev, op, value, meaning});
    };
    rule("ARM_WITHOUT_GPS", "COM_ARM_WO_GPS", Severity::notable, RuleOp::eq, 1,
         "Allows arming without GPS fix");
    rule("OBSTACLE_AVOIDANCE_OFF", "COM_OBS_AVOID", Severity::notable, RuleOp::eq, 0,
         "Obstacle avoidance disabled");
    rule("GEOFENCE_DISABLED", "GF_ACTION", Severity::notable, RuleOp::eq, 0,
         "Geofence violation triggers no failsafe action");
    rule("DATALINK_FAILSAFE_OFF", "NAV_DLL_ACT", Severity::notable, RuleOp::eq, 0,
         "Telemetry data-link loss does not trigger a failsafe");
    rule("RC_LOSS_FAILSAFE_OFF", "NAV_RCL_ACT", Severity::notable, RuleOp::eq, 0,
         "RC signal loss triggers no failsafe action");
    rule("RC_LOSS_RETURN_MODE", "NAV_RCL_ACT", Severity::info, RuleOp::eq, 2,
         "RC signal loss triggers return mode");
    rule("LOW_BATTERY_WARN_ONLY", "COM_LOW_BAT_ACT", Severity::notable, RuleOp::eq, 1,
         "Low battery triggers a warning only, no automatic return or land");
    rule("LOW_BATTERY_FAILSAFE_OFF", "COM_LOW_BAT_ACT", Severity::notable, RuleOp::eq, 0,
         "Low battery triggers no failsafe action");
    rule("LOGGING_ENABLED", "SDLOG_MODE", Severity::info, RuleOp::ge, 0,
         "Autopilot telemetry logging enabled (mode {value})");
    rule("LOGGING_DISABLED", "SDLOG_MODE", Severity::critical, RuleOp::eq, -1,
         "Autopilot telemetry logging disabled");
    rule("ARM_WITHOUT_MISSION_OK", "COM_ARM_MIS_REQ", Severity::info, RuleOp::eq, 0,
         "Arming does not require a valid mission");
    rule("POWER_CHECK_BYPASSED", "CBRK_SUPPLY_CHK", Severity::critical, RuleOp::eq, 894281,
         "Supply voltage arming check bypassed via circuit breaker");
    validate_catalog(c);
    return c;
  }();
  return catalog;
}

// ---------------------------------------------------------------------------
// Analysis

namespace detail {

inline std::string render_param_value(const ulog::ParamValue& v) {
  if (std::holds_alternative<std::int32_t>(v)) {
    return std::to_string(std::get<std::int32_t>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", static_cast<double>(std::get<float>(v)));
  return buf;
}

inline bool rule_matches(const FindingRule& rule, double observed) {
  switch (rule.op) {
    case RuleOp::eq: return observed == rule.value;
    case RuleOp::ne: return observed != rule.value;
    case RuleOp::lt: return observed < rule.value;
    case RuleOp::le: return observed <= rule.value;
    case RuleOp::gt: return observed > rule.value;
    case RuleOp::ge: return observed >= rule.value;
    case RuleOp::present: return true;
  }
  return false;
}

}  // namespace detail

/// Evaluates the catalog against the latest parameter values. Absent
/// parameters produce no finding. Output is ordered by severity
/// (critical first), then code — deterministic for a given input.
inline std::vector<Finding> analyze_parameters(const ulog::ParameterSet& params,
                                               const FindingCatalog& catalog) {
  std::vector<Finding> findings;
  for (const FindingRule& rule : catalog.rules) {
    auto it = params.entries.find(rule.parameter);
    if (it == params.entries.end()) continue;
    auto value = it->second.latest();
    if (!value) continue;
    const double observed = std::holds_alternative<float>(*value)
                                ? static_cast<double>(std::get<float>(*value))
                                : static_cast<double>(std::get<std::int32_t>(*value));
    if (!detail::rule_matches(rule, observed)) continue;
    Finding f;
    f.code = rule.code;
    f.severity = rule.severity;
    f.parameter = rule.parameter;
    f.observed = detail::render_param_value(*value);
    f.meaning = rule.meaning;
    if (auto pos = f.meaning.find("{value}"); pos != std::string::npos) {
      f.meaning.replace(pos, 7, f.observed);
    }
    findings.push_back(std::move(f));
  }
  std::sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    if (a.severity != b.severity) {
      return static_cast<int>(a.severity) > static_cast<int>(b.severity);
    }
    return a.code < b.code;
  });
  return findings;
}

/// MPC_XY_CRUISE, the autonomous-mission horizontal cruise speed. Absent
/// when the parameter was never recorded; range estimation then needs an
/// explicit speed input.
inline std::optional<double> cruise_speed_mps(const ulog::ParameterSet& params) {
  return params.latest_as_double("MPC_XY_CRUISE");
}

inline nlohmann::ordered_json to_json(const Finding& f) {
  return nlohmann::ordered_json{
      {"code", f.code},
      {"severity", to_string(f.severity)},
      {"parameter", f.parameter},
      {"observed", f.observed},
      {"meaning", f.meaning},
  };
}

}  // namespace uavf
