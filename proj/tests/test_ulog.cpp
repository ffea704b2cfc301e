#include <catch_amalgamated.hpp>

#include <random>

#include "support/fixtures.hpp"
#include "uavf/ulog.hpp"
#include "uavf/ulog_writer.hpp"

using namespace uavf;
using namespace uavf::ulog;

namespace {

// Raw stream builder, independent of write_ulog, for crafting byte-exact
// and deliberately damaged inputs.
struct RawStream {
  std::vector<std::uint8_t> bytes;

  RawStream() {
    bytes.assign(kMagic.begin(), kMagic.end());
    bytes.push_back(1);                          // version
    for (int i = 0; i < 8; ++i) bytes.push_back(0);  // start timestamp
  }
  void msg(char type, const std::vector<std::uint8_t>& payload) {
    bytes.push_back(static_cast<std::uint8_t>(payload.size() & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(payload.size() >> 8));
    bytes.push_back(static_cast<std::uint8_t>(type));
    bytes.insert(bytes.end(), payload.begin(), payload.end());
  }
  void msg(char type, const std::string& payload) {
    msg(type, std::vector<std::uint8_t>(payload.begin(), payload.end()));
  }
  static void u64_into(std::vector<std::uint8_t>& v, std::uint64_t x) {
    for (int i = 0; i < 8; ++i) v.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
  }
};

FlightLog minimal_log() {
  FlightLog log;
  log.header.start_timestamp_us = 42;
  log.formats.push_back(MessageFormat{"sensor_baro",
                                      {{"uint64_t", FieldType::u64, -1, "timestamp"},
                                       {"float", FieldType::f32, -1, "pressure"}}});
  fixtures::add_series(log, log.formats[0], 0, 0);
  log.parameters.entries["MPC_XY_CRUISE"].initial = 5.0f;
  auto& ts = log.series[{"sensor_baro", 0}];
  ts.rows.push_back({std::uint64_t{1000000}, fixtures::f32c(1013.25)});
  ts.rows.push_back({std::uint64_t{1100000}, fixtures::f32c(1013.20)});
  return log;
}

}  // namespace

TEST_CASE("minimal writer-produced log decodes", "[ulog]") {
  const FlightLog log = minimal_log();
  const auto bytes = write_ulog(log);
  const FlightLog parsed = parse_ulog(bytes);

  CHECK(parsed.parameters.entries.size() == 1);
  REQUIRE(parsed.series.size() == 1);
  const TimeSeries& ts = parsed.series.at({"sensor_baro", 0});
  REQUIRE(ts.rows.size() == 2);
  CHECK(ts.timestamp(0) == 1000000);
  CHECK(ts.value(1, 1) == Catch::Approx(1013.20).margin(1e-3));
  CHECK(content_equal(log, parsed));
  CHECK_FALSE(parsed.quality.truncated);
}

TEST_CASE("empty log is exactly the 16-byte header", "[ulog]") {
  FlightLog log;
  log.header.start_timestamp_us = 7;
  const auto bytes = write_ulog(log);
  REQUIRE(bytes.size() == 16);
  CHECK(std::equal(kMagic.begin(), kMagic.end(), bytes.begin()));
  CHECK(bytes[7] == 1);  // version
  CHECK(bytes[8] == 7);  // timestamp LSB
  const FlightLog parsed = parse_ulog(bytes);
  CHECK(content_equal(log, parsed));
}

TEST_CASE("bad magic is a format error", "[ulog]") {
  std::vector<std::uint8_t> zeros(64, 0);
  CHECK_THROWS_AS(parse_ulog(zeros), FormatError);
  std::vector<std::uint8_t> tiny = {0x55, 0x4C};
  CHECK_THROWS_AS(parse_ulog(tiny), FormatError);
}

TEST_CASE("single float parameter has the exact byte layout", "[ulog]") {
  FlightLog log;
  log.header.start_timestamp_us = 0;
  log.parameters.entries["MPC_XY_CRUISE"].initial = 5.0f;
  const auto bytes = write_ulog(log);

  // Frozen expectation: 16-byte header, then one 'P' message whose payload
  // is key_len=19, "float MPC_XY_CRUISE", then 5.0f little-endian.
  std::vector<std::uint8_t> expected(kMagic.begin(), kMagic.end());
  expected.push_back(1);
  for (int i = 0; i < 8; ++i) expected.push_back(0);
  expected.push_back(24);  // payload size lo (1 + 19 + 4)
  expected.push_back(0);   // payload size hi
  expected.push_back('P');
  expected.push_back(19);
  const std::string key = "float MPC_XY_CRUISE";
  expected.insert(expected.end(), key.begin(), key.end());
  expected.insert(expected.end(), {0x00, 0x00, 0xA0, 0x40});  // 5.0f LE
  CHECK(bytes == expected);
}

TEST_CASE("truncated final message salvages all prior rows", "[ulog]") {
  const FlightLog log = minimal_log();
  const auto bytes = write_ulog(log);
  // Cut inside the final data message: drop half of the last row payload.
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 6);
  const FlightLog parsed = parse_ulog(cut);
  CHECK(parsed.quality.truncated);
  const TimeSeries& ts = parsed.series.at({"sensor_baro", 0});
  CHECK(ts.rows.size() == 1);  // first row intact
  CHECK(ts.timestamp(0) == 1000000);
}

TEST_CASE("file ending inside the header is partial, not fatal", "[ulog]") {
  std::vector<std::uint8_t> bytes(kMagic.begin(), kMagic.end());
  bytes.push_back(1);
  bytes.push_back(0);  // 9 bytes: inside the timestamp
  const FlightLog parsed = parse_ulog(bytes);
  CHECK(parsed.quality.truncated);
}

TEST_CASE("parameter written pre-arm and mid-flight gets in-flight provenance", "[ulog]") {
  FlightLog log = minimal_log();
  log.parameters.entries["MPC_XY_CRUISE"].changed = 2.0f;
  const FlightLog parsed = parse_ulog(write_ulog(log));
  const auto& entry = parsed.parameters.entries.at("MPC_XY_CRUISE");
  REQUIRE(entry.changed.has_value());
  CHECK(std::get<float>(*entry.changed) == 2.0f);
  CHECK(std::get<float>(*entry.initial) == 5.0f);
  CHECK(entry.latest_provenance() == ParamProvenance::changed_in_flight);
  CHECK(std::get<float>(*entry.latest()) == 2.0f);

  CHECK(parse_ulog(write_ulog(FlightLog{})).parameters.empty());
}

TEST_CASE("dropouts carry the preceding data timestamp", "[ulog]") {
  SECTION("no dropout messages") {
    CHECK(detect_dropouts(parse_ulog(write_ulog(minimal_log()))).empty());
  }
  SECTION("one dropout at a known instant") {
    FlightLog log = minimal_log();
    log.dropouts.push_back({1000000, 250});
    const auto drops = detect_dropouts(parse_ulog(write_ulog(log)));
    REQUIRE(drops.size() == 1);
    CHECK(drops[0].timestamp_us == 1000000);
    CHECK(drops[0].duration_ms == 250);
  }
  SECTION("two dropouts stay in file order") {
    FlightLog log = minimal_log();
    log.dropouts.push_back({1000000, 250});
    log.dropouts.push_back({1100000, 80});
    const auto drops = detect_dropouts(parse_ulog(write_ulog(log)));
    REQUIRE(drops.size() == 2);
    CHECK(drops[0].duration_ms == 250);
    CHECK(drops[1].duration_ms == 80);
  }
}

TEST_CASE("round-trip property over generated logs", "[ulog]") {
  std::mt19937_64 rng(0x5EED);
  for (int i = 0; i < 100; ++i) {
    const FlightLog log = fixtures::make_random_log(rng);
    const auto bytes = write_ulog(log);
    const FlightLog parsed = parse_ulog(bytes);
    if (!content_equal(log, parsed)) {
      CAPTURE(i);
      REQUIRE(content_equal(log, parsed));
    }
  }
  SUCCEED("100 generated logs round-tripped");
}

TEST_CASE("per-series timestamps stay non-decreasing after parse", "[ulog]") {
  std::mt19937_64 rng(0xFACE);
  for (int i = 0; i < 30; ++i) {
    const FlightLog parsed = parse_ulog(write_ulog(fixtures::make_random_log(rng)));
    for (const auto& [key, ts] : parsed.series) {
      for (std::size_t r = 1; r < ts.rows.size(); ++r) {
        REQUIRE(ts.timestamp(r) >= ts.timestamp(r - 1));
      }
    }
  }
}

TEST_CASE("non-monotonic data downgrades to a warning", "[ulog]") {
  RawStream raw;
  raw.msg('F', "m:uint64_t timestamp;");
  std::vector<std::uint8_t> sub = {0x00, 0x00, 0x00};  // multi 0, msg_id 0
  sub.insert(sub.end(), {'m'});
  raw.msg('A', sub);
  std::vector<std::uint8_t> d1 = {0x00, 0x00};
  RawStream::u64_into(d1, 200);
  raw.msg('D', d1);
  std::vector<std::uint8_t> d2 = {0x00, 0x00};
  RawStream::u64_into(d2, 100);  // goes backwards
  raw.msg('D', d2);

  const FlightLog parsed = parse_ulog(raw.bytes);
  const TimeSeries& ts = parsed.series.at({"m", 0});
  CHECK(ts.rows.size() == 2);  // both rows kept
  bool warned = false;
  for (const auto& n : parsed.quality.notes) warned |= n.find("non-monotonic") != std::string::npos;
  CHECK(warned);
}

TEST_CASE("unknown message types are counted, never fatal", "[ulog]") {
  RawStream raw;
  raw.msg('Z', std::string("????"));
  raw.msg('F', "m:uint64_t timestamp;");
  const FlightLog parsed = parse_ulog(raw.bytes);
  CHECK(parsed.quality.unknown_message_types == 1);
  CHECK(parsed.formats.size() == 1);
}

TEST_CASE("data for unsubscribed msg ids is counted", "[ulog]") {
  RawStream raw;
  raw.msg('F', "m:uint64_t timestamp;");
  std::vector<std::uint8_t> sub = {0x00, 0x00, 0x00, 'm'};
  raw.msg('A', sub);
  std::vector<std::uint8_t> d = {0x09, 0x00};  // msg_id 9 never subscribed
  RawStream::u64_into(d, 5);
  raw.msg('D', d);
  const FlightLog parsed = parse_ulog(raw.bytes);
  CHECK(parsed.quality.unknown_msg_id_records == 1);
}

TEST_CASE("remove-subscription stops decoding that id", "[ulog]") {
  RawStream raw;
  raw.msg('F', "m:uint64_t timestamp;");
  raw.msg('A', std::vector<std::uint8_t>{0x00, 0x00, 0x00, 'm'});
  std::vector<std::uint8_t> d1 = {0x00, 0x00};
  RawStream::u64_into(d1, 5);
  raw.msg('D', d1);
  raw.msg('R', std::vector<std::uint8_t>{0x00, 0x00});
  raw.msg('D', d1);
  const FlightLog parsed = parse_ulog(raw.bytes);
  CHECK(parsed.series.at({"m", 0}).rows.size() == 1);
  CHECK(parsed.quality.unknown_msg_id_records == 1);
}

TEST_CASE("string parameters are recorded as skipped", "[ulog]") {
  RawStream raw;
  std::vector<std::uint8_t> p;
  const std::string key = "char[4] NAME";
  p.push_back(static_cast<std::uint8_t>(key.size()));
  p.insert(p.end(), key.begin(), key.end());
  p.insert(p.end(), {'a', 'b', 'c', 'd'});
  raw.msg('P', p);
  const FlightLog parsed = parse_ulog(raw.bytes);
  CHECK(parsed.parameters.empty());
  CHECK(parsed.quality.malformed_messages == 1);
  bool noted = false;
  for (const auto& n : parsed.quality.notes) noted |= n.find("unsupported type") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("nested formats flatten one level", "[ulog]") {
  FlightLog log;
  log.formats.push_back(MessageFormat{"inner",
                                      {{"float", FieldType::f32, -1, "a"},
                                       {"float", FieldType::f32, -1, "b"}}});
  log.formats.push_back(MessageFormat{"outer",
                                      {{"uint64_t", FieldType::u64, -1, "timestamp"},
                                       {"inner", FieldType::nested, -1, "pose"}}});
  fixtures::add_series(log, log.formats[1], 0, 0);
  auto& ts = log.series[{"outer", 0}];
  REQUIRE(ts.columns.size() == 3);
  CHECK(ts.columns[1].name == "pose.a");
  CHECK(ts.columns[2].name == "pose.b");
  ts.rows.push_back({std::uint64_t{10}, 1.5, 2.5});

  const FlightLog parsed = parse_ulog(write_ulog(log));
  CHECK(content_equal(log, parsed));
}

TEST_CASE("nesting deeper than one level records the series raw", "[ulog]") {
  RawStream raw;
  raw.msg('F', "leaf:float x;");
  raw.msg('F', "mid:leaf l;");
  raw.msg('F', "top:uint64_t timestamp;mid m;");
  raw.msg('A', std::vector<std::uint8_t>{0x00, 0x00, 0x00, 't', 'o', 'p'});
  std::vector<std::uint8_t> d = {0x00, 0x00};
  RawStream::u64_into(d, 5);
  d.insert(d.end(), {0, 0, 0, 0});
  raw.msg('D', d);
  const FlightLog parsed = parse_ulog(raw.bytes);
  CHECK(parsed.series.count({"top", 0}) == 0);
  bool noted = false;
  for (const auto& n : parsed.quality.notes) {
    noted |= n.find("not decodable") != std::string::npos;
  }
  CHECK(noted);
  CHECK(parsed.quality.unknown_msg_id_records == 1);
}

TEST_CASE("trailing padding fields may be absent from data", "[ulog]") {
  RawStream raw;
  raw.msg('F', "m:uint64_t timestamp;uint8_t v;uint8_t[3] _padding0;");
  raw.msg('A', std::vector<std::uint8_t>{0x00, 0x00, 0x00, 'm'});
  std::vector<std::uint8_t> d = {0x00, 0x00};
  RawStream::u64_into(d, 5);
  d.push_back(42);  // v only; padding omitted
  raw.msg('D', d);
  const FlightLog parsed = parse_ulog(raw.bytes);
  const TimeSeries& ts = parsed.series.at({"m", 0});
  REQUIRE(ts.rows.size() == 1);
  REQUIRE(ts.columns.size() == 2);  // padding produces no column
  CHECK(std::get<std::uint64_t>(ts.rows[0][1]) == 42);
}

TEST_CASE("incompatible flag bits stop parsing at the declared offset", "[ulog]") {
  FlightLog log = minimal_log();
  log.incompat_flags[0] = kIncompatDataAppended;
  auto bytes = write_ulog(log);
  // The flag-bits message sits right after the header; appended_offsets[0]
  // occupies payload bytes 16..23, i.e. file offset 19+16.
  const std::size_t off_pos = 16 + 3 + 16;
  const std::uint64_t declared = bytes.size() - 20;  // cut inside the data section
  for (int i = 0; i < 8; ++i) {
    bytes[off_pos + i] = static_cast<std::uint8_t>(declared >> (8 * i));
  }
  const FlightLog parsed = parse_ulog(bytes);
  CHECK(parsed.quality.truncated);
  CHECK(parsed.quality.parsed_until_offset <= declared);
  bool noted = false;
  for (const auto& n : parsed.quality.notes) {
    noted |= n.find("incompatible flag bits") != std::string::npos;
  }
  CHECK(noted);

  SECTION("unknown incompatible bit with no offset stops immediately") {
    FlightLog log2 = minimal_log();
    log2.incompat_flags[3] = 0x80;
    const FlightLog parsed2 = parse_ulog(write_ulog(log2));
    CHECK(parsed2.quality.truncated);
    CHECK(parsed2.series.empty());
  }
}

TEST_CASE("writer validates FlightLog invariants", "[ulog]") {
  SECTION("series without subscription") {
    FlightLog log;
    log.formats.push_back(MessageFormat{"m", {{"uint64_t", FieldType::u64, -1, "timestamp"}}});
    TimeSeries ts;
    ts.message_name = "m";
    ts.columns = detail::build_decode_plan(log.formats[0], log.formats).columns;
    log.series[{"m", 0}] = ts;
    CHECK_THROWS_AS(write_ulog(log), ValidationError);
  }
  SECTION("subscription without format") {
    FlightLog log;
    log.subscriptions.push_back({0, "ghost", 0});
    CHECK_THROWS_AS(write_ulog(log), ValidationError);
  }
  SECTION("ragged row") {
    FlightLog log = minimal_log();
    log.series[{"sensor_baro", 0}].rows.push_back({std::uint64_t{2000000}});
    CHECK_THROWS_AS(write_ulog(log), ValidationError);
  }
  SECTION("decreasing timestamps") {
    FlightLog log = minimal_log();
    log.series[{"sensor_baro", 0}].rows.push_back({std::uint64_t{5}, 0.0});
    CHECK_THROWS_AS(write_ulog(log), ValidationError);
  }
  SECTION("dropout that matches no data timestamp") {
    FlightLog log = minimal_log();
    log.dropouts.push_back({123456, 10});
    CHECK_THROWS_AS(write_ulog(log), ValidationError);
  }
}

TEST_CASE("fuzzed mutations never crash the parser", "[ulog]") {
  std::mt19937_64 rng(0xDEAD5EED);
  const FlightLog base = minimal_log();
  auto valid = write_ulog(base);
  {
    // Make the corpus a little richer than the minimal log.
    FlightLog bigger = fixtures::make_random_log(rng);
    auto more = write_ulog(bigger);
    valid.insert(valid.end(), more.begin(), more.end());
  }

  int outcomes[3] = {0, 0, 0};  // success, partial, format-error
  for (int i = 0; i < 300; ++i) {
    std::vector<std::uint8_t> mutated = valid;
    const int n_flips = 1 + static_cast<int>(rng() % 8);
    for (int f = 0; f < n_flips; ++f) {
      mutated[rng() % mutated.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    }
    if (rng() % 4 == 0) mutated.resize(rng() % mutated.size());
    try {
      const FlightLog parsed = parse_ulog(mutated);
      ++outcomes[parsed.quality.truncated ? 1 : 0];
    } catch (const FormatError&) {
      ++outcomes[2];
    }
  }
  INFO("success=" << outcomes[0] << " partial=" << outcomes[1] << " format=" << outcomes[2]);
  SUCCEED();
}

TEST_CASE("checked-in golden fixture matches writer output byte for byte", "[ulog]") {
  const std::filesystem::path golden =
      std::filesystem::path(UAVF_SOURCE_DIR) / "fixtures/ulog/mission_flight.ulg";
  REQUIRE(std::filesystem::exists(golden));

  std::ifstream in(golden, std::ios::binary);
  std::vector<std::uint8_t> file_bytes((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());

  const FlightLog parsed = parse_ulog(file_bytes);
  CHECK_FALSE(parsed.quality.truncated);
  CHECK(write_ulog(parsed) == file_bytes);

  // Spot checks pinned to the documented byte map.
  CHECK(parsed.header.start_timestamp_us == 481000000);
  CHECK(std::get<float>(*parsed.parameters.entries.at("MPC_XY_CRUISE").initial) == 5.0f);
  CHECK(parsed.series.at({"sensor_baro", 0}).rows.size() == 3);
  REQUIRE(parsed.dropouts.size() == 1);
  CHECK(parsed.dropouts[0].duration_ms == 250);
}
