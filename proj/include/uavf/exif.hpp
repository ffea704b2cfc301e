#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "uavf/time.hpp"

namespace uavf {

// Minimal EXIF date-time extraction for JPEG media. Walks the APP1 TIFF
// structure for DateTimeOriginal (0x9003) with DateTime (0x0132) as a
// fallback. Cameras do not record a timezone in these fields; the value is
// interpreted as-is and the media clock alignment carries any offset.

namespace exif_detail {

inline std::uint16_t rd16(const std::uint8_t* p, bool le) {
  return le ? static_cast<std::uint16_t>(p[0] | p[1] << 8)
            : static_cast<std::uint16_t>(p[0] << 8 | p[1]);
}

inline std::uint32_t rd32(const std::uint8_t* p, bool le) {
  return le ? (std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
               std::uint32_t(p[3]) << 24)
            : (std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 |
               std::uint32_t(p[2]) << 8 | std::uint32_t(p[3]));
}

/// "YYYY:MM:DD HH:MM:SS" per the EXIF spec.
inline std::optional<UtcTime> parse_exif_datetime(const std::string& s) {
  int y, mo, d, h, mi, se;
  if (std::sscanf(s.c_str(), "%4d:%2d:%2d %2d:%2d:%2d", &y, &mo, &d, &h, &mi, &se) != 6) {
    return std::nullopt;
  }
  if (y < 1970 || mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
  std::tm tm{};
  tm.tm_year = y - 1900;
  tm.tm_mon = mo - 1;
  tm.tm_mday = d;
  tm.tm_hour = h;
  tm.tm_min = mi;
  tm.tm_sec = se;
  return UtcTime{static_cast<std::int64_t>(timegm(&tm)) * 1000000};
}

/// Scans one IFD for an ASCII tag; returns its text when found.
inline std::optional<std::string> ifd_ascii_tag(const std::vector<std::uint8_t>& tiff,
                                                std::size_t ifd_off, bool le,
                                                std::uint16_t wanted,
                                                std::optional<std::size_t>* exif_ifd_off) {
  if (ifd_off + 2 > tiff.size()) return std::nullopt;
  const std::uint16_t count = rd16(tiff.data() + ifd_off, le);
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::size_t e = ifd_off + 2 + std::size_t(i) * 12;
    if (e + 12 > tiff.size()) return std::nullopt;
    const std::uint16_t tag = rd16(tiff.data() + e, le);
    const std::uint16_t type = rd16(tiff.data() + e + 2, le);
    const std::uint32_t n = rd32(tiff.data() + e + 4, le);
    if (exif_ifd_off && tag == 0x8769 && (type == 4 || type == 3)) {
      *exif_ifd_off = rd32(tiff.data() + e + 8, le);
    }
    if (tag == wanted && type == 2) {  // ASCII
      std::size_t off = n <= 4 ? e + 8 : rd32(tiff.data() + e + 8, le);
      if (off + n > tiff.size() || n == 0) return std::nullopt;
      std::string text(reinterpret_cast<const char*>(tiff.data() + off), n);
      while (!text.empty() && (text.back() == '\0' || text.back() == ' ')) text.pop_back();
      return text;
    }
  }
  return std::nullopt;
}

}  // namespace exif_detail

/// Capture timestamp from JPEG EXIF metadata, if any.
inline std::optional<UtcTime> exif_capture_time(const std::vector<std::uint8_t>& bytes) {
  using namespace exif_detail;
  if (bytes.size() < 4 || bytes[0] != 0xFF || bytes[1] != 0xD8) return std::nullopt;

  // Walk JPEG segments for APP1/Exif.
  std::size_t pos = 2;
  std::vector<std::uint8_t> tiff;
  while (pos + 4 <= bytes.size()) {
    if (bytes[pos] != 0xFF) return std::nullopt;
    const std::uint8_t marker = bytes[pos + 1];
    if (marker == 0xD9 || marker == 0xDA) break;  // EOI / image data
    const std::size_t seg_len = (std::size_t(bytes[pos + 2]) << 8) | bytes[pos + 3];
    if (seg_len < 2 || pos + 2 + seg_len > bytes.size()) return std::nullopt;
    if (marker == 0xE1 && seg_len >= 8 + 2 &&
        std::memcmp(bytes.data() + pos + 4, "Exif\0\0", 6) == 0) {
      tiff.assign(bytes.begin() + pos + 10, bytes.begin() + pos + 2 + seg_len);
      break;
    }
    pos += 2 + seg_len;
  }
  if (tiff.size() < 8) return std::nullopt;

  bool le;
  if (tiff[0] == 'I' && tiff[1] == 'I') {
    le = true;
  } else if (tiff[0] == 'M' && tiff[1] == 'M') {
    le = false;
  } else {
    return std::nullopt;
  }
  if (rd16(tiff.data() + 2, le) != 42) return std::nullopt;
  const std::size_t ifd0 = rd32(tiff.data() + 4, le);

  std::optional<std::size_t> exif_ifd;
  auto dt_fallback = ifd_ascii_tag(tiff, ifd0, le, 0x0132, &exif_ifd);
  if (exif_ifd) {
    if (auto dto = ifd_ascii_tag(tiff, *exif_ifd, le, 0x9003, nullptr)) {
      if (auto t = parse_exif_datetime(*dto)) return t;
    }
  }
  if (dt_fallback) return parse_exif_datetime(*dt_fallback);
  return std::nullopt;
}

inline std::optional<UtcTime> exif_capture_time_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return exif_capture_time(bytes);
}

}  // namespace uavf
