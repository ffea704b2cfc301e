#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <string>

#include "uavf/errors.hpp"

namespace uavf {

/// Environment variable that pins "now" for reproducible outputs.
/// Accepts an RFC 3339 timestamp or an integer count of Unix seconds.
inline constexpr const char* kTestEpochEnv = "UAVF_TEST_EPOCH";

/// A UTC instant with microsecond resolution. All timestamps in the toolkit
/// are stored and rendered in UTC (RFC 3339); local time never enters.
struct UtcTime {
  std::int64_t us_since_epoch = 0;

  constexpr auto operator<=>(const UtcTime&) const = default;

  static UtcTime from_unix_seconds(double s) {
    return UtcTime{static_cast<std::int64_t>(s * 1e6)};
  }
  double unix_seconds() const { return static_cast<double>(us_since_epoch) / 1e6; }
};

inline UtcTime operator+(UtcTime t, double seconds) {
  return UtcTime{t.us_since_epoch + static_cast<std::int64_t>(seconds * 1e6)};
}

/// Renders as RFC 3339, e.g. "2023-02-20T10:31:05Z". Sub-second digits are
/// emitted only when present.
inline std::string render_rfc3339(UtcTime t) {
  std::int64_t us = t.us_since_epoch;
  std::int64_t frac = us % 1000000;
  std::int64_t sec = us / 1000000;
  if (frac < 0) {  // floor division for pre-1970 instants
    frac += 1000000;
    sec -= 1;
  }
  std::time_t tt = static_cast<std::time_t>(sec);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec);
  std::string out = buf;
  if (frac != 0) {
    std::snprintf(buf, sizeof buf, ".%06lld", static_cast<long long>(frac));
    out += buf;
    while (out.back() == '0') out.pop_back();
  }
  out += 'Z';
  return out;
}

/// Parses RFC 3339 with 'Z' or a numeric offset. Throws DocumentError on
/// malformed input.
inline UtcTime parse_rfc3339(const std::string& s) {
  std::tm tm{};
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0, n = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &se, &n) != 6) {
    throw DocumentError("not an RFC 3339 timestamp: " + s, "timestamp");
  }
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = se;
  std::int64_t frac_us = 0;
  const char* p = s.c_str() + n;
  if (*p == '.') {
    ++p;
    std::int64_t scale = 100000;
    while (*p >= '0' && *p <= '9') {
      if (scale > 0) frac_us += (*p - '0') * scale;
      scale /= 10;
      ++p;
    }
  }
  std::int64_t off_s = 0;
  if (*p == 'Z' || *p == 'z') {
    ++p;
  } else if (*p == '+' || *p == '-') {
    int oh = 0, om = 0;
    int sign = (*p == '-') ? -1 : 1;
    if (std::sscanf(p + 1, "%2d:%2d", &oh, &om) != 2) {
      throw DocumentError("bad UTC offset in timestamp: " + s, "timestamp");
    }
    off_s = sign * (oh * 3600 + om * 60);
    p += 6;
  } else {
    throw DocumentError("timestamp lacks UTC designator: " + s, "timestamp");
  }
  if (*p != '\0') throw DocumentError("trailing bytes after timestamp: " + s, "timestamp");
  std::int64_t sec = static_cast<std::int64_t>(timegm(&tm)) - off_s;
  return UtcTime{sec * 1000000 + frac_us};
}

/// Current UTC time, or the pinned test epoch when UAVF_TEST_EPOCH is set.
inline UtcTime now_utc() {
  if (const char* pinned = std::getenv(kTestEpochEnv); pinned && *pinned) {
    char* end = nullptr;
    long long secs = std::strtoll(pinned, &end, 10);
    if (end && *end == '\0') return UtcTime{secs * 1000000};
    return parse_rfc3339(pinned);
  }
  std::timespec ts{};
  std::timespec_get(&ts, TIME_UTC);
  return UtcTime{static_cast<std::int64_t>(ts.tv_sec) * 1000000 + ts.tv_nsec / 1000};
}

}  // namespace uavf
