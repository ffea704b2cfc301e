#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uavf/errors.hpp"

namespace uavf::ulog {

// ---------------------------------------------------------------------------
// On-disk layout constants.
//
// File = 16-byte header, then a stream of messages. Every message starts
// with a 3-byte header: u16 payload size (little-endian) + u8 type.
// Definitions ('B','F','I','M','P','Q') precede the data phase, which
// begins at the first subscription/data-class message.

inline constexpr std::array<std::uint8_t, 7> kMagic = {0x55, 0x4C, 0x6F, 0x67, 0x01, 0x12, 0x35};
inline constexpr std::array<std::uint8_t, 8> kSyncMagic = {0x2F, 0x73, 0x13, 0x20,
                                                           0x25, 0x0C, 0xBB, 0x12};
inline constexpr std::size_t kFileHeaderSize = 16;
inline constexpr std::size_t kMessageHeaderSize = 3;

enum MsgType : std::uint8_t {
  kMsgFlagBits = 'B',
  kMsgFormat = 'F',
  kMsgInfo = 'I',
  kMsgInfoMulti = 'M',
  kMsgParameter = 'P',
  kMsgParameterDefault = 'Q',
  kMsgAddSubscription = 'A',
  kMsgRemoveSubscription = 'R',
  kMsgData = 'D',
  kMsgLogString = 'L',
  kMsgLogStringTagged = 'C',
  kMsgSync = 'S',
  kMsgDropout = 'O',
};

/// incompat_flags[0] bit 0: data appended after the regular stream.
inline constexpr std::uint8_t kIncompatDataAppended = 0x01;

// ---------------------------------------------------------------------------
// Format definitions

enum class FieldType : std::uint8_t {
  i8, u8, i16, u16, i32, u32, i64, u64, f32, f64, boolean, chr,
  nested,  // field typed by another message format's name
};

inline std::optional<FieldType> field_type_from_name(const std::string& s) {
  if (s == "int8_t") return FieldType::i8;
  if (s == "uint8_t") return FieldType::u8;
  if (s == "int16_t") return FieldType::i16;
  if (s == "uint16_t") return FieldType::u16;
  if (s == "int32_t") return FieldType::i32;
  if (s == "uint32_t") return FieldType::u32;
  if (s == "int64_t") return FieldType::i64;
  if (s == "uint64_t") return FieldType::u64;
  if (s == "float") return FieldType::f32;
  if (s == "double") return FieldType::f64;
  if (s == "bool") return FieldType::boolean;
  if (s == "char") return FieldType::chr;
  return std::nullopt;
}

inline std::size_t scalar_size(FieldType t) {
  switch (t) {
    case FieldType::i8:
    case FieldType::u8:
    case FieldType::boolean:
    case FieldType::chr: return 1;
    case FieldType::i16:
    case FieldType::u16: return 2;
    case FieldType::i32:
    case FieldType::u32:
    case FieldType::f32: return 4;
    case FieldType::i64:
    case FieldType::u64:
    case FieldType::f64: return 8;
    case FieldType::nested: return 0;  // resolved via the referenced format
  }
  return 0;
}

/// One declared field: "type_name[array_len] name". array_len < 0 means a
/// plain scalar. For nested fields, type_name is the referenced format.
struct Field {
  std::string type_name;
  FieldType type = FieldType::u8;
  int array_len = -1;
  std::string name;

  bool operator==(const Field&) const = default;
  bool is_padding() const { return name.rfind("_padding", 0) == 0; }
};

struct MessageFormat {
  std::string name;
  std::vector<Field> fields;

  bool operator==(const MessageFormat&) const = default;
};

// ---------------------------------------------------------------------------
// Decoded data

/// Decoded scalar. Signed integers widen to int64, unsigned (and bool) to
/// uint64, floats to double (exactly), char arrays become strings.
using CellValue = std::variant<std::int64_t, std::uint64_t, double, std::string>;

struct ColumnDesc {
  std::string name;  // flattened, e.g. "q[2]" or "pose.x"
  FieldType type = FieldType::u8;

  bool operator==(const ColumnDesc&) const = default;
};

/// One subscription's decoded records. Column 0 is always the u64
/// timestamp in microseconds since power-on.
struct TimeSeries {
  std::string message_name;
  std::uint8_t multi_id = 0;
  std::vector<ColumnDesc> columns;
  std::vector<std::vector<CellValue>> rows;

  bool operator==(const TimeSeries&) const = default;

  std::uint64_t timestamp(std::size_t row) const {
    return std::get<std::uint64_t>(rows[row][0]);
  }
  std::optional<std::size_t> column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i].name == name) return i;
    }
    return std::nullopt;
  }
  /// Cell as double, whatever the underlying integer width.
  double value(std::size_t row, std::size_t col) const {
    const CellValue& c = rows[row][col];
    if (std::holds_alternative<double>(c)) return std::get<double>(c);
    if (std::holds_alternative<std::int64_t>(c)) {
      return static_cast<double>(std::get<std::int64_t>(c));
    }
    if (std::holds_alternative<std::uint64_t>(c)) {
      return static_cast<double>(std::get<std::uint64_t>(c));
    }
    return 0.0;
  }
};

struct Subscription {
  std::uint16_t msg_id = 0;
  std::string message_name;
  std::uint8_t multi_id = 0;

  bool operator==(const Subscription&) const = default;
};

// ---------------------------------------------------------------------------
// Parameters and info

using ParamValue = std::variant<std::int32_t, float>;

enum class ParamProvenance { initial, changed_in_flight, default_value };

inline const char* to_string(ParamProvenance p) {
  switch (p) {
    case ParamProvenance::initial: return "initial";
    case ParamProvenance::changed_in_flight: return "changed_in_flight";
    case ParamProvenance::default_value: return "default";
  }
  return "initial";
}

struct ParamEntry {
  std::optional<ParamValue> initial;
  std::optional<ParamValue> changed;  // last in-flight change wins
  // Default value plus the raw default-type bitfield from the 'Q' message.
  std::optional<std::pair<std::uint8_t, ParamValue>> sys_default;

  bool operator==(const ParamEntry&) const = default;

  std::optional<ParamValue> latest() const {
    if (changed) return changed;
    if (initial) return initial;
    if (sys_default) return sys_default->second;
    return std::nullopt;
  }
  std::optional<ParamProvenance> latest_provenance() const {
    if (changed) return ParamProvenance::changed_in_flight;
    if (initial) return ParamProvenance::initial;
    if (sys_default) return ParamProvenance::default_value;
    return std::nullopt;
  }
};

struct ParameterSet {
  std::map<std::string, ParamEntry> entries;

  bool operator==(const ParameterSet&) const = default;

  bool empty() const { return entries.empty(); }

  std::optional<ParamValue> latest(const std::string& name) const {
    auto it = entries.find(name);
    if (it == entries.end()) return std::nullopt;
    return it->second.latest();
  }
  /// Latest value as double regardless of the stored width.
  std::optional<double> latest_as_double(const std::string& name) const {
    auto v = latest(name);
    if (!v) return std::nullopt;
    if (std::holds_alternative<float>(*v)) return static_cast<double>(std::get<float>(*v));
    return static_cast<double>(std::get<std::int32_t>(*v));
  }
};

/// Key-value metadata written by the logger ("sys_os_name" etc.). The
/// declared type string is kept so the entry re-encodes bit-exactly.
struct InfoEntry {
  std::string key_type;
  std::string key;
  CellValue value;

  bool operator==(const InfoEntry&) const = default;
};

struct MultiInfoEntry {
  std::uint8_t is_continued = 0;
  std::string key_type;
  std::string key;
  CellValue value;

  bool operator==(const MultiInfoEntry&) const = default;
};

struct LoggedMessage {
  std::uint64_t timestamp_us = 0;
  std::uint8_t level = 0;  // kernel-style 0..7
  std::optional<std::uint16_t> tag;
  std::string text;

  bool operator==(const LoggedMessage&) const = default;
};

struct Dropout {
  std::uint64_t timestamp_us = 0;  // latest data timestamp seen before the gap
  std::uint16_t duration_ms = 0;

  bool operator==(const Dropout&) const = default;
};

// ---------------------------------------------------------------------------
// The parsed log

struct UlogHeader {
  std::array<std::uint8_t, 7> magic = kMagic;
  std::uint8_t version = 1;
  std::uint64_t start_timestamp_us = 0;

  bool operator==(const UlogHeader&) const = default;
};

/// Everything the parser salvaged plus how trustworthy it is. A truncated
/// or damaged log still yields all records decoded before the damage.
struct DataQuality {
  bool truncated = false;
  std::uint64_t parsed_until_offset = 0;
  std::uint32_t unknown_message_types = 0;
  std::uint32_t unknown_msg_id_records = 0;
  std::uint32_t malformed_messages = 0;
  std::vector<std::string> notes;
};

struct FlightLog {
  UlogHeader header;
  std::array<std::uint8_t, 8> compat_flags{};
  std::array<std::uint8_t, 8> incompat_flags{};
  std::array<std::uint64_t, 3> appended_offsets{};
  std::vector<MessageFormat> formats;  // file order
  std::vector<InfoEntry> info;         // file order
  std::vector<MultiInfoEntry> multi_info;
  ParameterSet parameters;
  std::vector<Subscription> subscriptions;  // file order
  std::map<std::pair<std::string, std::uint8_t>, TimeSeries> series;
  std::vector<LoggedMessage> logged_text;
  std::vector<Dropout> dropouts;
  DataQuality quality;  // parser bookkeeping; excluded from content_equal

  const MessageFormat* find_format(const std::string& name) const {
    for (const auto& f : formats) {
      if (f.name == name) return &f;
    }
    return nullptr;
  }
  const TimeSeries* find_series(const std::string& name, std::uint8_t multi_id = 0) const {
    auto it = series.find({name, multi_id});
    return it == series.end() ? nullptr : &it->second;
  }
  std::optional<std::string> info_string(const std::string& key) const {
    for (const auto& e : info) {
      if (e.key == key && std::holds_alternative<std::string>(e.value)) {
        return std::get<std::string>(e.value);
      }
    }
    return std::nullopt;
  }
  std::optional<std::uint64_t> info_uint(const std::string& key) const {
    for (const auto& e : info) {
      if (e.key == key && std::holds_alternative<std::uint64_t>(e.value)) {
        return std::get<std::uint64_t>(e.value);
      }
    }
    return std::nullopt;
  }
};

/// Structural equality of the decoded content. Parser bookkeeping
/// (skip counters, truncation notes) is deliberately excluded, so a
/// round-trip through write_ulog compares equal.
inline bool content_equal(const FlightLog& a, const FlightLog& b) {
  return a.header == b.header && a.compat_flags == b.compat_flags &&
         a.incompat_flags == b.incompat_flags && a.appended_offsets == b.appended_offsets &&
         a.formats == b.formats && a.info == b.info && a.multi_info == b.multi_info &&
         a.parameters == b.parameters && a.subscriptions == b.subscriptions &&
         a.series == b.series && a.logged_text == b.logged_text && a.dropouts == b.dropouts;
}

// ---------------------------------------------------------------------------
// Parser internals

namespace detail {

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }
  bool has(std::size_t n) const { return remaining() >= n; }
  void skip(std::size_t n) { pos_ += n; }
  const std::uint8_t* cursor() const { return data_ + pos_; }

  std::uint8_t u8() { return data_[pos_++]; }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                      static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::string str(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

inline std::uint64_t decode_unsigned(const std::uint8_t* p, std::size_t n) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline CellValue decode_scalar(FieldType t, const std::uint8_t* p) {
  switch (t) {
    case FieldType::i8: return static_cast<std::int64_t>(static_cast<std::int8_t>(p[0]));
    case FieldType::u8:
    case FieldType::boolean: return static_cast<std::uint64_t>(p[0]);
    case FieldType::i16:
      return static_cast<std::int64_t>(static_cast<std::int16_t>(decode_unsigned(p, 2)));
    case FieldType::u16: return decode_unsigned(p, 2);
    case FieldType::i32:
      return static_cast<std::int64_t>(static_cast<std::int32_t>(decode_unsigned(p, 4)));
    case FieldType::u32: return decode_unsigned(p, 4);
    case FieldType::i64: return static_cast<std::int64_t>(decode_unsigned(p, 8));
    case FieldType::u64: return decode_unsigned(p, 8);
    case FieldType::f32: {
      float f;
      std::uint32_t raw = static_cast<std::uint32_t>(decode_unsigned(p, 4));
      std::memcpy(&f, &raw, 4);
      return static_cast<double>(f);
    }
    case FieldType::f64: {
      double d;
      std::uint64_t raw = decode_unsigned(p, 8);
      std::memcpy(&d, &raw, 8);
      return d;
    }
    case FieldType::chr: return std::string(reinterpret_cast<const char*>(p), 1);
    case FieldType::nested: break;
  }
  return std::uint64_t{0};
}

/// Strips trailing NULs; used for char[N] payloads.
inline std::string trim_nul(std::string s) {
  while (!s.empty() && s.back() == '\0') s.pop_back();
  return s;
}

/// Parses "message_name:type0 field0;type1 field1;". Returns nullopt on any
/// structural violation; the caller records a malformed-message count.
inline std::optional<MessageFormat> parse_format_payload(const std::string& payload) {
  auto colon = payload.find(':');
  if (colon == std::string::npos || colon == 0) return std::nullopt;
  MessageFormat fmt;
  fmt.name = payload.substr(0, colon);
  std::size_t pos = colon + 1;
  while (pos < payload.size()) {
    auto semi = payload.find(';', pos);
    if (semi == std::string::npos) return std::nullopt;  // fields must be ';'-terminated
    std::string fielddef = payload.substr(pos, semi - pos);
    pos = semi + 1;
    if (fielddef.empty()) return std::nullopt;
    auto space = fielddef.find(' ');
    if (space == std::string::npos || space == 0 || space + 1 >= fielddef.size()) {
      return std::nullopt;
    }
    std::string type_str = fielddef.substr(0, space);
    Field field;
    field.name = fielddef.substr(space + 1);
    auto bracket = type_str.find('[');
    if (bracket != std::string::npos) {
      if (type_str.back() != ']') return std::nullopt;
      std::string len_str = type_str.substr(bracket + 1, type_str.size() - bracket - 2);
      if (len_str.empty() || len_str.size() > 5) return std::nullopt;
      int len = 0;
      for (char c : len_str) {
        if (c < '0' || c > '9') return std::nullopt;
        len = len * 10 + (c - '0');
      }
      if (len <= 0 || len > 16384) return std::nullopt;
      field.array_len = len;
      type_str = type_str.substr(0, bracket);
    }
    field.type_name = type_str;
    if (auto ft = field_type_from_name(type_str)) {
      field.type = *ft;
    } else {
      field.type = FieldType::nested;
    }
    fmt.fields.push_back(std::move(field));
  }
  if (fmt.fields.empty()) return std::nullopt;
  return fmt;
}

/// Precomputed decode layout for one subscription: flattened columns with
/// byte offsets. Trailing padding fields consume bytes but produce no
/// column, and data messages may legally omit them.
struct DecodePlan {
  std::vector<ColumnDesc> columns;
  struct Slot {
    std::size_t offset;
    FieldType type;
    int char_len;  // >0: char[N] decoded as one string column
  };
  std::vector<Slot> slots;  // parallel to columns
  std::size_t full_row_size = 0;
  std::size_t min_row_size = 0;  // without trailing padding
  bool valid = false;
  std::string issue;
};

inline DecodePlan build_decode_plan(const MessageFormat& fmt,
                                    const std::vector<MessageFormat>& all) {
  DecodePlan plan;
  std::size_t offset = 0;
  std::size_t last_non_padding_end = 0;

  auto find_format = [&](const std::string& name) -> const MessageFormat* {
    for (const auto& f : all) {
      if (f.name == name) return &f;
    }
    return nullptr;
  };

  auto emit_scalar_run = [&](const Field& f, const std::string& prefix) {
    const std::size_t sz = scalar_size(f.type);
    if (f.type == FieldType::chr && f.array_len > 0) {
      plan.columns.push_back({prefix + f.name, FieldType::chr});
      plan.slots.push_back({offset, FieldType::chr, f.array_len});
      offset += static_cast<std::size_t>(f.array_len);
      return;
    }
    const int count = f.array_len < 0 ? 1 : f.array_len;
    for (int i = 0; i < count; ++i) {
      std::string col_name = prefix + f.name;
      if (f.array_len >= 0) col_name += "[" + std::to_string(i) + "]";
      plan.columns.push_back({col_name, f.type});
      plan.slots.push_back({offset, f.type, 0});
      offset += sz;
    }
  };

  for (const Field& f : fmt.fields) {
    if (f.type == FieldType::nested) {
      // Flatten exactly one level; deeper nesting is out of decode scope.
      const MessageFormat* nested = find_format(f.type_name);
      if (!nested) {
        plan.issue = "field '" + f.name + "' references unknown format '" + f.type_name + "'";
        return plan;
      }
      const int count = f.array_len < 0 ? 1 : f.array_len;
      for (int i = 0; i < count; ++i) {
        std::string prefix = f.name;
        if (f.array_len >= 0) prefix += "[" + std::to_string(i) + "]";
        prefix += ".";
        for (const Field& nf : nested->fields) {
          if (nf.type == FieldType::nested) {
            plan.issue = "format '" + fmt.name + "' nests deeper than one level via '" +
                         f.name + "." + nf.name + "'";
            return plan;
          }
          emit_scalar_run(nf, prefix);
          if (!nf.is_padding()) last_non_padding_end = offset;
        }
      }
    } else {
      if (f.is_padding()) {
        // Padding consumes bytes; trailing padding may be absent on disk.
        const std::size_t sz = scalar_size(f.type) *
                               static_cast<std::size_t>(f.array_len < 0 ? 1 : f.array_len);
        offset += sz;
        continue;
      }
      emit_scalar_run(f, "");
      last_non_padding_end = offset;
    }
  }
  plan.full_row_size = offset;
  plan.min_row_size = last_non_padding_end;
  if (plan.columns.empty()) {
    plan.issue = "no decodable columns";
    return plan;
  }
  if (plan.columns[0].type != FieldType::u64) {
    plan.issue = "first field is not a uint64 timestamp";
    return plan;
  }
  plan.valid = true;
  return plan;
}

inline std::vector<CellValue> decode_row(const DecodePlan& plan, const std::uint8_t* bytes,
                                         std::size_t available) {
  std::vector<CellValue> row;
  row.reserve(plan.columns.size());
  for (std::size_t i = 0; i < plan.slots.size(); ++i) {
    const auto& slot = plan.slots[i];
    if (slot.char_len > 0) {
      if (slot.offset + static_cast<std::size_t>(slot.char_len) > available) {
        row.emplace_back(std::string{});
        continue;
      }
      row.emplace_back(trim_nul(std::string(
          reinterpret_cast<const char*>(bytes + slot.offset),
          static_cast<std::size_t>(slot.char_len))));
    } else {
      if (slot.offset + scalar_size(slot.type) > available) {
        row.emplace_back(std::uint64_t{0});
        continue;
      }
      row.emplace_back(decode_scalar(slot.type, bytes + slot.offset));
    }
  }
  return row;
}

/// Splits an info/parameter key "type name" into (type, name); nullopt when
/// malformed or the type is not recognizable.
struct KeySpec {
  std::string type_str;
  FieldType type;
  int array_len;  // -1 scalar
  std::string name;
};

inline std::optional<KeySpec> parse_key(const std::string& key) {
  auto space = key.find(' ');
  if (space == std::string::npos || space == 0 || space + 1 >= key.size()) return std::nullopt;
  KeySpec spec;
  spec.type_str = key.substr(0, space);
  spec.name = key.substr(space + 1);
  spec.array_len = -1;
  std::string base = spec.type_str;
  auto bracket = base.find('[');
  if (bracket != std::string::npos) {
    if (base.back() != ']') return std::nullopt;
    std::string len_str = base.substr(bracket + 1, base.size() - bracket - 2);
    if (len_str.empty() || len_str.size() > 5) return std::nullopt;
    int len = 0;
    for (char c : len_str) {
      if (c < '0' || c > '9') return std::nullopt;
      len = len * 10 + (c - '0');
    }
    if (len <= 0 || len > 16384) return std::nullopt;
    spec.array_len = len;
    base = base.substr(0, bracket);
  }
  auto ft = field_type_from_name(base);
  if (!ft) return std::nullopt;
  spec.type = *ft;
  return spec;
}

/// Decodes an info value per its declared key type. Non-char arrays are
/// preserved as raw byte strings so they re-encode exactly.
inline std::optional<CellValue> decode_info_value(const KeySpec& spec,
                                                  const std::uint8_t* p, std::size_t len) {
  if (spec.type == FieldType::chr) {
    const std::size_t want = spec.array_len < 0 ? 1 : static_cast<std::size_t>(spec.array_len);
    if (len != want) return std::nullopt;
    return trim_nul(std::string(reinterpret_cast<const char*>(p), len));
  }
  if (spec.array_len < 0) {
    if (len != scalar_size(spec.type)) return std::nullopt;
    return decode_scalar(spec.type, p);
  }
  const std::size_t want = scalar_size(spec.type) * static_cast<std::size_t>(spec.array_len);
  if (len != want) return std::nullopt;
  return std::string(reinterpret_cast<const char*>(p), len);  // raw, re-encoded verbatim
}

}  // namespace detail

// ---------------------------------------------------------------------------
// parse_ulog

/// Decodes a ULog byte stream in a single deterministic pass.
///
/// Error policy is forensic: a bad magic number throws FormatError, but any
/// damage after a valid header degrades to a partial result — everything
/// decoded before the damage is kept and quality.truncated is set. Unknown
/// message types are skipped and counted, never fatal.
inline FlightLog parse_ulog(std::span<const std::uint8_t> bytes) {
  using namespace detail;

  FlightLog log;
  if (bytes.size() < kMagic.size() ||
      !std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw FormatError("not a ULog file (bad magic)", 0);
  }
  if (bytes.size() < kFileHeaderSize) {
    log.quality.truncated = true;
    log.quality.parsed_until_offset = bytes.size();
    log.quality.notes.push_back("file ends inside the 16-byte header");
    if (bytes.size() > kMagic.size()) log.header.version = bytes[kMagic.size()];
    return log;
  }

  ByteReader r(bytes.data(), bytes.size());
  r.skip(kMagic.size());
  log.header.version = r.u8();
  log.header.start_timestamp_us = r.u64();

  std::size_t limit = bytes.size();
  bool in_data = false;
  std::uint64_t last_data_ts = 0;

  // Decode state: msg_id -> (series key, decode plan index).
  struct ActiveSub {
    std::pair<std::string, std::uint8_t> key;
    std::size_t plan_index;
    bool decodable;
  };
  std::map<std::uint16_t, ActiveSub> active;
  std::vector<DecodePlan> plans;
  std::vector<std::string> undecodable_noted;

  bool first_message = true;
  while (r.pos() < limit) {
    if (limit - r.pos() < kMessageHeaderSize) {
      log.quality.truncated = true;
      log.quality.notes.push_back("trailing partial message header at offset " +
                                  std::to_string(r.pos()));
      break;
    }
    const std::size_t msg_start = r.pos();
    const std::uint16_t msg_size = r.u16();
    const std::uint8_t msg_type = r.u8();
    if (limit - r.pos() < msg_size) {
      log.quality.truncated = true;
      log.quality.notes.push_back("message of type '" + std::string(1, char(msg_type)) +
                                  "' truncated at offset " + std::to_string(msg_start));
      r.skip(limit - r.pos());
      break;
    }
    const std::uint8_t* payload = r.cursor();
    r.skip(msg_size);

    if (first_message) {
      first_message = false;
      if (msg_type == kMsgFlagBits) {
        if (msg_size < 40) {
          ++log.quality.malformed_messages;
          log.quality.notes.push_back("flag-bits message shorter than 40 bytes");
          continue;
        }
        for (int i = 0; i < 8; ++i) log.compat_flags[i] = payload[i];
        for (int i = 0; i < 8; ++i) log.incompat_flags[i] = payload[8 + i];
        for (int i = 0; i < 3; ++i) {
          log.appended_offsets[i] = decode_unsigned(payload + 16 + 8 * i, 8);
        }
        bool any_incompat = false;
        for (auto b : log.incompat_flags) any_incompat |= (b != 0);
        if (any_incompat) {
          // Incompatible content beyond the declared offset cannot be
          // trusted; salvage up to there and flag the log as partial.
          std::uint64_t declared = 0;
          for (auto off : log.appended_offsets) {
            if (off != 0 && (declared == 0 || off < declared)) declared = off;
          }
          std::size_t stop = declared == 0
                                 ? r.pos()
                                 : static_cast<std::size_t>(std::min<std::uint64_t>(
                                       declared, bytes.size()));
          if (stop < r.pos()) stop = r.pos();
          limit = stop;
          log.quality.truncated = true;
          log.quality.notes.push_back(
              "incompatible flag bits set; parsing stops at offset " + std::to_string(stop) +
              " leaving " + std::to_string(bytes.size() - stop) + " bytes unparsed");
        }
        continue;
      }
    }

    switch (msg_type) {
      case kMsgFlagBits:
        // Only valid as the first message; elsewhere it is malformed.
        ++log.quality.malformed_messages;
        break;
      case kMsgFormat: {
        auto fmt = parse_format_payload(std::string(reinterpret_cast<const char*>(payload),
                                                    msg_size));
        if (!fmt) {
          ++log.quality.malformed_messages;
          break;
        }
        log.formats.push_back(std::move(*fmt));
        break;
      }
      case kMsgInfo:
      case kMsgInfoMulti: {
        ByteReader pr(payload, msg_size);
        std::uint8_t is_continued = 0;
        if (msg_type == kMsgInfoMulti) {
          if (!pr.has(1)) { ++log.quality.malformed_messages; break; }
          is_continued = pr.u8();
        }
        if (!pr.has(1)) { ++log.quality.malformed_messages; break; }
        const std::uint8_t key_len = pr.u8();
        if (!pr.has(key_len)) { ++log.quality.malformed_messages; break; }
        const std::string key = pr.str(key_len);
        auto spec = parse_key(key);
        if (!spec) { ++log.quality.malformed_messages; break; }
        auto value = decode_info_value(*spec, pr.cursor(), pr.remaining());
        if (!value) { ++log.quality.malformed_messages; break; }
        if (msg_type == kMsgInfo) {
          log.info.push_back({spec->type_str, spec->name, std::move(*value)});
        } else {
          log.multi_info.push_back({is_continued, spec->type_str, spec->name,
                                    std::move(*value)});
        }
        break;
      }
      case kMsgParameter:
      case kMsgParameterDefault: {
        ByteReader pr(payload, msg_size);
        std::uint8_t default_types = 0;
        if (msg_type == kMsgParameterDefault) {
          if (!pr.has(1)) { ++log.quality.malformed_messages; break; }
          default_types = pr.u8();
        }
        if (!pr.has(1)) { ++log.quality.malformed_messages; break; }
        const std::uint8_t key_len = pr.u8();
        if (!pr.has(key_len)) { ++log.quality.malformed_messages; break; }
        const std::string key = pr.str(key_len);
        auto spec = parse_key(key);
        if (!spec || spec->array_len >= 0 ||
            (spec->type != FieldType::f32 && spec->type != FieldType::i32)) {
          ++log.quality.malformed_messages;
          log.quality.notes.push_back("parameter with unsupported type skipped: " + key);
          break;
        }
        if (pr.remaining() != 4) { ++log.quality.malformed_messages; break; }
        ParamValue value;
        if (spec->type == FieldType::f32) {
          float f;
          std::uint32_t raw = static_cast<std::uint32_t>(decode_unsigned(pr.cursor(), 4));
          std::memcpy(&f, &raw, 4);
          value = f;
        } else {
          value = static_cast<std::int32_t>(
              static_cast<std::uint32_t>(decode_unsigned(pr.cursor(), 4)));
        }
        ParamEntry& entry = log.parameters.entries[spec->name];
        if (msg_type == kMsgParameterDefault) {
          entry.sys_default = {default_types, value};
        } else if (in_data) {
          entry.changed = value;
        } else {
          entry.initial = value;
        }
        break;
      }
      case kMsgAddSubscription: {
        in_data = true;
        if (msg_size < 3) { ++log.quality.malformed_messages; break; }
        ByteReader pr(payload, msg_size);
        Subscription sub;
        sub.multi_id = pr.u8();
        sub.msg_id = pr.u16();
        sub.message_name = pr.str(pr.remaining());
        const MessageFormat* fmt = log.find_format(sub.message_name);
        ActiveSub as;
        as.key = {sub.message_name, sub.multi_id};
        as.decodable = false;
        as.plan_index = 0;
        if (!fmt) {
          log.quality.notes.push_back("subscription to undefined format '" +
                                      sub.message_name + "'");
        } else {
          DecodePlan plan = build_decode_plan(*fmt, log.formats);
          if (!plan.valid) {
            if (std::find(undecodable_noted.begin(), undecodable_noted.end(),
                          sub.message_name) == undecodable_noted.end()) {
              undecodable_noted.push_back(sub.message_name);
              log.quality.notes.push_back("series '" + sub.message_name +
                                          "' not decodable: " + plan.issue);
            }
          } else {
            plans.push_back(std::move(plan));
            as.plan_index = plans.size() - 1;
            as.decodable = true;
            TimeSeries& ts = log.series[as.key];
            if (ts.columns.empty()) {
              ts.message_name = sub.message_name;
              ts.multi_id = sub.multi_id;
              ts.columns = plans[as.plan_index].columns;
            }
          }
        }
        active[sub.msg_id] = std::move(as);
        log.subscriptions.push_back(std::move(sub));
        break;
      }
      case kMsgRemoveSubscription: {
        in_data = true;
        if (msg_size != 2) { ++log.quality.malformed_messages; break; }
        ByteReader pr(payload, msg_size);
        active.erase(pr.u16());
        break;
      }
      case kMsgData: {
        in_data = true;
        if (msg_size < 2) { ++log.quality.malformed_messages; break; }
        ByteReader pr(payload, msg_size);
        const std::uint16_t msg_id = pr.u16();
        auto it = active.find(msg_id);
        if (it == active.end() || !it->second.decodable) {
          ++log.quality.unknown_msg_id_records;
          break;
        }
        const DecodePlan& plan = plans[it->second.plan_index];
        if (pr.remaining() < plan.min_row_size) {
          ++log.quality.malformed_messages;
          break;
        }
        TimeSeries& ts = log.series[it->second.key];
        ts.rows.push_back(decode_row(plan, pr.cursor(), pr.remaining()));
        const std::size_t n = ts.rows.size();
        if (n >= 2) {
          const std::uint64_t prev = ts.timestamp(n - 2);
          const std::uint64_t cur = ts.timestamp(n - 1);
          if (cur < prev) {
            const std::string note = "non-monotonic timestamps in series '" +
                                     ts.message_name + "'";
            if (std::find(log.quality.notes.begin(), log.quality.notes.end(), note) ==
                log.quality.notes.end()) {
              log.quality.notes.push_back(note);
            }
          }
        }
        last_data_ts = std::max(last_data_ts, ts.timestamp(n - 1));
        break;
      }
      case kMsgLogString:
      case kMsgLogStringTagged: {
        in_data = true;
        const std::size_t head = msg_type == kMsgLogString ? 9 : 11;
        if (msg_size < head) { ++log.quality.malformed_messages; break; }
        ByteReader pr(payload, msg_size);
        LoggedMessage lm;
        lm.level = pr.u8();
        if (msg_type == kMsgLogStringTagged) lm.tag = pr.u16();
        lm.timestamp_us = pr.u64();
        lm.text = pr.str(pr.remaining());
        log.logged_text.push_back(std::move(lm));
        break;
      }
      case kMsgSync: {
        in_data = true;
        if (msg_size != kSyncMagic.size() ||
            !std::equal(kSyncMagic.begin(), kSyncMagic.end(), payload)) {
          ++log.quality.malformed_messages;
        }
        break;
      }
      case kMsgDropout: {
        in_data = true;
        if (msg_size != 2) { ++log.quality.malformed_messages; break; }
        ByteReader pr(payload, msg_size);
        log.dropouts.push_back({last_data_ts, pr.u16()});
        break;
      }
      default:
        ++log.quality.unknown_message_types;
        break;
    }
  }

  log.quality.parsed_until_offset = r.pos();
  return log;
}

inline FlightLog parse_ulog(const std::vector<std::uint8_t>& bytes) {
  return parse_ulog(std::span<const std::uint8_t>(bytes.data(), bytes.size()));
}

inline FlightLog parse_ulog_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open flight log", path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return parse_ulog(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

// ---------------------------------------------------------------------------
// Parameter / dropout extraction (thin views over the parsed log)

inline ParameterSet extract_parameters(const FlightLog& log) { return log.parameters; }

inline std::vector<Dropout> detect_dropouts(const FlightLog& log) { return log.dropouts; }

}  // namespace uavf::ulog
