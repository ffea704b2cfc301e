#pragma once

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "uavf/ulog.hpp"

namespace uavf::ulog {

// Synthetic ULog emitter. Exists so tests and fixtures can produce
// byte-exact logs without autopilot hardware; parse_ulog(write_ulog(log))
// reproduces the input content.

namespace detail {

class ByteWriter {
 public:
  std::vector<std::uint8_t> take() { return std::move(buf_); }
  std::size_t size() const { return buf_.size(); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u16(std::uint16_t v) {
    buf_.push_back(static_cast<std::uint8_t>(v));
    buf_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void str(const std::string& s) { raw(s.data(), s.size()); }

  void message(std::uint8_t type, const std::vector<std::uint8_t>& payload) {
    if (payload.size() > 0xFFFF) {
      throw ValidationError("ULog message payload exceeds 65535 bytes");
    }
    u16(static_cast<std::uint16_t>(payload.size()));
    u8(type);
    raw(payload.data(), payload.size());
  }

 private:
  std::vector<std::uint8_t> buf_;
};

inline void encode_unsigned(std::vector<std::uint8_t>& out, std::uint64_t v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void encode_scalar(std::vector<std::uint8_t>& out, FieldType t, const CellValue& cell) {
  const auto as_unsigned = [&]() -> std::uint64_t {
    if (std::holds_alternative<std::uint64_t>(cell)) return std::get<std::uint64_t>(cell);
    if (std::holds_alternative<std::int64_t>(cell)) {
      return static_cast<std::uint64_t>(std::get<std::int64_t>(cell));
    }
    throw ValidationError("cell value does not match integer column type");
  };
  switch (t) {
    case FieldType::i8:
    case FieldType::u8:
    case FieldType::boolean: encode_unsigned(out, as_unsigned(), 1); return;
    case FieldType::i16:
    case FieldType::u16: encode_unsigned(out, as_unsigned(), 2); return;
    case FieldType::i32:
    case FieldType::u32: encode_unsigned(out, as_unsigned(), 4); return;
    case FieldType::i64:
    case FieldType::u64: encode_unsigned(out, as_unsigned(), 8); return;
    case FieldType::f32: {
      if (!std::holds_alternative<double>(cell)) {
        throw ValidationError("cell value does not match float column type");
      }
      const float f = static_cast<float>(std::get<double>(cell));
      std::uint32_t raw;
      std::memcpy(&raw, &f, 4);
      encode_unsigned(out, raw, 4);
      return;
    }
    case FieldType::f64: {
      if (!std::holds_alternative<double>(cell)) {
        throw ValidationError("cell value does not match double column type");
      }
      std::uint64_t raw;
      std::memcpy(&raw, &std::get<double>(cell), 8);
      encode_unsigned(out, raw, 8);
      return;
    }
    case FieldType::chr: {
      if (!std::holds_alternative<std::string>(cell)) {
        throw ValidationError("cell value does not match char column type");
      }
      const std::string& s = std::get<std::string>(cell);
      if (s.size() != 1) throw ValidationError("scalar char cell must hold one byte");
      out.push_back(static_cast<std::uint8_t>(s[0]));
      return;
    }
    case FieldType::nested: break;
  }
  throw ValidationError("cannot encode nested field directly");
}

inline void encode_chars(std::vector<std::uint8_t>& out, const CellValue& cell,
                         std::size_t len) {
  if (!std::holds_alternative<std::string>(cell)) {
    throw ValidationError("cell value does not match char[] column type");
  }
  const std::string& s = std::get<std::string>(cell);
  if (s.size() > len) {
    throw ValidationError("char[] cell longer than declared length " + std::to_string(len));
  }
  out.insert(out.end(), s.begin(), s.end());
  out.insert(out.end(), len - s.size(), 0);
}

inline std::string render_format(const MessageFormat& fmt) {
  std::string out = fmt.name + ":";
  for (const Field& f : fmt.fields) {
    out += f.type_name;
    if (f.array_len >= 0) out += "[" + std::to_string(f.array_len) + "]";
    out += " " + f.name + ";";
  }
  return out;
}

inline std::vector<std::uint8_t> encode_info_value(const std::string& key_type,
                                                   const CellValue& value) {
  // Reuse the key grammar: "<type> x" parses the declared type.
  auto spec = parse_key(key_type + " x");
  if (!spec) throw ValidationError("unparseable info key type: " + key_type);
  std::vector<std::uint8_t> out;
  if (spec->type == FieldType::chr) {
    encode_chars(out, value, spec->array_len < 0 ? 1 : static_cast<std::size_t>(spec->array_len));
  } else if (spec->array_len < 0) {
    encode_scalar(out, spec->type, value);
  } else {
    // Raw scalar-array payload preserved verbatim as a byte string.
    if (!std::holds_alternative<std::string>(value)) {
      throw ValidationError("array-typed info value must be a raw byte string");
    }
    const std::string& raw = std::get<std::string>(value);
    const std::size_t want = scalar_size(spec->type) * static_cast<std::size_t>(spec->array_len);
    if (raw.size() != want) {
      throw ValidationError("info value length does not match declared type " + key_type);
    }
    out.insert(out.end(), raw.begin(), raw.end());
  }
  return out;
}

inline std::vector<std::uint8_t> encode_keyed(const std::string& key_type,
                                              const std::string& name,
                                              const CellValue& value) {
  const std::string key = key_type + " " + name;
  if (key.size() > 255) throw ValidationError("info/parameter key exceeds 255 bytes");
  std::vector<std::uint8_t> payload;
  payload.push_back(static_cast<std::uint8_t>(key.size()));
  payload.insert(payload.end(), key.begin(), key.end());
  auto value_bytes = encode_info_value(key_type, value);
  payload.insert(payload.end(), value_bytes.begin(), value_bytes.end());
  return payload;
}

inline std::vector<std::uint8_t> encode_param(const std::string& name, const ParamValue& value) {
  const bool is_float = std::holds_alternative<float>(value);
  const std::string key = std::string(is_float ? "float" : "int32_t") + " " + name;
  if (key.size() > 255) throw ValidationError("parameter key exceeds 255 bytes");
  std::vector<std::uint8_t> payload;
  payload.push_back(static_cast<std::uint8_t>(key.size()));
  payload.insert(payload.end(), key.begin(), key.end());
  if (is_float) {
    std::uint32_t raw;
    const float f = std::get<float>(value);
    std::memcpy(&raw, &f, 4);
    encode_unsigned(payload, raw, 4);
  } else {
    encode_unsigned(payload, static_cast<std::uint32_t>(std::get<std::int32_t>(value)), 4);
  }
  return payload;
}

}  // namespace detail

/// Serializes a FlightLog to ULog bytes. Throws ValidationError when the
/// log violates FlightLog invariants (unknown formats, ragged rows,
/// decreasing timestamps, unplaceable dropouts).
inline std::vector<std::uint8_t> write_ulog(const FlightLog& log) {
  using namespace detail;

  if (log.header.magic != kMagic) throw ValidationError("FlightLog header magic is not ULog");

  // Validate formats and build decode plans (also used for encoding).
  std::vector<DecodePlan> plans(log.formats.size());
  for (std::size_t i = 0; i < log.formats.size(); ++i) {
    const MessageFormat& fmt = log.formats[i];
    if (fmt.name.empty() || fmt.name.find(':') != std::string::npos ||
        fmt.name.find(';') != std::string::npos) {
      throw ValidationError("invalid format name: '" + fmt.name + "'");
    }
    for (std::size_t j = i + 1; j < log.formats.size(); ++j) {
      if (log.formats[j].name == fmt.name) {
        throw ValidationError("duplicate format name: " + fmt.name);
      }
    }
    auto reparsed = parse_format_payload(render_format(fmt));
    if (!reparsed || !(*reparsed == fmt)) {
      throw ValidationError("format '" + fmt.name + "' does not survive rendering");
    }
    plans[i] = build_decode_plan(fmt, log.formats);
  }

  auto plan_for = [&](const std::string& name) -> const DecodePlan* {
    for (std::size_t i = 0; i < log.formats.size(); ++i) {
      if (log.formats[i].name == name) return &plans[i];
    }
    return nullptr;
  };

  // Validate subscriptions.
  for (std::size_t i = 0; i < log.subscriptions.size(); ++i) {
    const Subscription& sub = log.subscriptions[i];
    if (!log.find_format(sub.message_name)) {
      throw ValidationError("subscription '" + sub.message_name + "' has no format definition");
    }
    for (std::size_t j = i + 1; j < log.subscriptions.size(); ++j) {
      if (log.subscriptions[j].msg_id == sub.msg_id) {
        throw ValidationError("duplicate subscription msg_id " + std::to_string(sub.msg_id));
      }
    }
  }

  // Validate series against their subscription and format plan.
  for (const auto& [key, ts] : log.series) {
    const auto& [name, multi_id] = key;
    bool subscribed = false;
    for (const auto& sub : log.subscriptions) {
      subscribed |= (sub.message_name == name && sub.multi_id == multi_id);
    }
    if (!subscribed) {
      throw ValidationError("series '" + name + "' (multi " + std::to_string(multi_id) +
                            ") has no subscription");
    }
    const DecodePlan* plan = plan_for(name);
    if (!plan || !plan->valid) {
      throw ValidationError("series '" + name + "' has no decodable format");
    }
    if (ts.columns != plan->columns) {
      throw ValidationError("series '" + name + "' columns do not match its format");
    }
    std::uint64_t prev_ts = 0;
    for (std::size_t r = 0; r < ts.rows.size(); ++r) {
      if (ts.rows[r].size() != ts.columns.size()) {
        throw ValidationError("series '" + name + "' row " + std::to_string(r) +
                              " has wrong arity");
      }
      if (!std::holds_alternative<std::uint64_t>(ts.rows[r][0])) {
        throw ValidationError("series '" + name + "' row " + std::to_string(r) +
                              " lacks a u64 timestamp");
      }
      const std::uint64_t t = ts.timestamp(r);
      if (r > 0 && t < prev_ts) {
        throw ValidationError("series '" + name + "' timestamps decrease at row " +
                              std::to_string(r));
      }
      prev_ts = t;
    }
  }

  // Dropout placement: the on-disk format stores no dropout timestamp, so a
  // dropout round-trips only when its timestamp equals the latest data
  // timestamp at its stream position.
  {
    std::vector<std::uint64_t> all_row_ts;
    for (const auto& [key, ts] : log.series) {
      for (std::size_t r = 0; r < ts.rows.size(); ++r) all_row_ts.push_back(ts.timestamp(r));
    }
    std::sort(all_row_ts.begin(), all_row_ts.end());
    std::uint64_t prev = 0;
    for (const Dropout& d : log.dropouts) {
      if (d.timestamp_us < prev) {
        throw ValidationError("dropouts must be ordered by timestamp");
      }
      prev = d.timestamp_us;
      const bool at_row = std::binary_search(all_row_ts.begin(), all_row_ts.end(),
                                             d.timestamp_us);
      if (!at_row && d.timestamp_us != 0) {
        throw ValidationError("dropout at " + std::to_string(d.timestamp_us) +
                              " us does not coincide with any data timestamp");
      }
    }
  }
  for (std::size_t i = 1; i < log.logged_text.size(); ++i) {
    if (log.logged_text[i].timestamp_us < log.logged_text[i - 1].timestamp_us) {
      throw ValidationError("logged text must be ordered by timestamp");
    }
  }

  ByteWriter w;
  w.raw(kMagic.data(), kMagic.size());
  w.u8(log.header.version);
  w.u64(log.header.start_timestamp_us);

  // Flag-bits message only when it carries information; an all-default log
  // stays at the bare 16-byte header.
  bool any_flag = false;
  for (auto b : log.compat_flags) any_flag |= (b != 0);
  for (auto b : log.incompat_flags) any_flag |= (b != 0);
  for (auto off : log.appended_offsets) any_flag |= (off != 0);
  if (any_flag) {
    std::vector<std::uint8_t> flags;
    flags.insert(flags.end(), log.compat_flags.begin(), log.compat_flags.end());
    flags.insert(flags.end(), log.incompat_flags.begin(), log.incompat_flags.end());
    for (auto off : log.appended_offsets) encode_unsigned(flags, off, 8);
    w.message(kMsgFlagBits, flags);
  }

  for (const MessageFormat& fmt : log.formats) {
    const std::string rendered = render_format(fmt);
    w.message(kMsgFormat, std::vector<std::uint8_t>(rendered.begin(), rendered.end()));
  }
  for (const InfoEntry& e : log.info) {
    w.message(kMsgInfo, encode_keyed(e.key_type, e.key, e.value));
  }
  for (const MultiInfoEntry& e : log.multi_info) {
    std::vector<std::uint8_t> payload;
    payload.push_back(e.is_continued);
    auto keyed = encode_keyed(e.key_type, e.key, e.value);
    payload.insert(payload.end(), keyed.begin(), keyed.end());
    w.message(kMsgInfoMulti, payload);
  }
  for (const auto& [name, entry] : log.parameters.entries) {
    if (name.empty()) throw ValidationError("parameter with empty name");
    if (entry.initial) w.message(kMsgParameter, encode_param(name, *entry.initial));
  }
  for (const auto& [name, entry] : log.parameters.entries) {
    if (entry.sys_default) {
      std::vector<std::uint8_t> payload;
      payload.push_back(entry.sys_default->first);
      auto keyed = encode_param(name, entry.sys_default->second);
      payload.insert(payload.end(), keyed.begin(), keyed.end());
      w.message(kMsgParameterDefault, payload);
    }
  }

  // Data section: subscriptions, then in-flight parameter changes, then the
  // time-merged record stream.
  std::map<std::pair<std::string, std::uint8_t>, std::uint16_t> msg_ids;
  for (const Subscription& sub : log.subscriptions) {
    std::vector<std::uint8_t> payload;
    payload.push_back(sub.multi_id);
    encode_unsigned(payload, sub.msg_id, 2);
    payload.insert(payload.end(), sub.message_name.begin(), sub.message_name.end());
    w.message(kMsgAddSubscription, payload);
    msg_ids[{sub.message_name, sub.multi_id}] = sub.msg_id;
  }

  bool any_changed = false;
  for (const auto& [name, entry] : log.parameters.entries) any_changed |= entry.changed.has_value();
  if (any_changed && log.subscriptions.empty()) {
    // Open the data section so the changes parse with in-flight provenance.
    w.message(kMsgSync, std::vector<std::uint8_t>(kSyncMagic.begin(), kSyncMagic.end()));
  }
  for (const auto& [name, entry] : log.parameters.entries) {
    if (entry.changed) w.message(kMsgParameter, encode_param(name, *entry.changed));
  }

  // K-way merge of rows, logged text and dropouts by timestamp. Ties break
  // rows < text < dropouts so dropout timestamps resolve correctly on read.
  struct Cursor {
    const TimeSeries* ts;
    const DecodePlan* plan;
    std::uint16_t msg_id;
    std::size_t next = 0;
  };
  std::vector<Cursor> cursors;
  for (const auto& [key, ts] : log.series) {
    cursors.push_back({&ts, plan_for(ts.message_name), msg_ids.at(key), 0});
  }
  std::size_t text_next = 0;
  std::size_t drop_next = 0;

  for (;;) {
    int best_kind = -1;  // 0 row, 1 text, 2 dropout
    std::size_t best_cursor = 0;
    std::uint64_t best_ts = 0;
    for (std::size_t i = 0; i < cursors.size(); ++i) {
      const Cursor& c = cursors[i];
      if (c.next >= c.ts->rows.size()) continue;
      const std::uint64_t t = c.ts->timestamp(c.next);
      if (best_kind < 0 || t < best_ts) {
        best_kind = 0;
        best_cursor = i;
        best_ts = t;
      }
    }
    if (text_next < log.logged_text.size()) {
      const std::uint64_t t = log.logged_text[text_next].timestamp_us;
      if (best_kind < 0 || t < best_ts) {
        best_kind = 1;
        best_ts = t;
      }
    }
    if (drop_next < log.dropouts.size()) {
      const std::uint64_t t = log.dropouts[drop_next].timestamp_us;
      if (best_kind < 0 || t < best_ts) {
        best_kind = 2;
        best_ts = t;
      }
    }
    if (best_kind < 0) break;

    if (best_kind == 0) {
      Cursor& c = cursors[best_cursor];
      std::vector<std::uint8_t> payload;
      encode_unsigned(payload, c.msg_id, 2);
      const auto& row = c.ts->rows[c.next];
      // Encode via the plan so mid-row padding stays zero-filled.
      std::vector<std::uint8_t> rowbytes(c.plan->full_row_size, 0);
      std::vector<std::uint8_t> tmp;
      for (std::size_t s = 0; s < c.plan->slots.size(); ++s) {
        const auto& slot = c.plan->slots[s];
        tmp.clear();
        if (slot.char_len > 0) {
          encode_chars(tmp, row[s], static_cast<std::size_t>(slot.char_len));
        } else {
          encode_scalar(tmp, slot.type, row[s]);
        }
        std::copy(tmp.begin(), tmp.end(), rowbytes.begin() + slot.offset);
      }
      payload.insert(payload.end(), rowbytes.begin(), rowbytes.end());
      w.message(kMsgData, payload);
      ++c.next;
    } else if (best_kind == 1) {
      const LoggedMessage& lm = log.logged_text[text_next++];
      std::vector<std::uint8_t> payload;
      payload.push_back(lm.level);
      if (lm.tag) encode_unsigned(payload, *lm.tag, 2);
      encode_unsigned(payload, lm.timestamp_us, 8);
      payload.insert(payload.end(), lm.text.begin(), lm.text.end());
      w.message(lm.tag ? kMsgLogStringTagged : kMsgLogString, payload);
    } else {
      const Dropout& d = log.dropouts[drop_next++];
      std::vector<std::uint8_t> payload;
      encode_unsigned(payload, d.duration_ms, 2);
      w.message(kMsgDropout, payload);
    }
  }

  return w.take();
}

}  // namespace uavf::ulog
