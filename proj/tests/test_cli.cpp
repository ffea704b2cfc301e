#include <catch_amalgamated.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "support/case_builder.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args, const std::string& epoch = "") {
  static int seq = 0;
  const fs::path base = fs::temp_directory_path() /
                        ("uavf_cli_io_" + std::to_string(::getpid()));
  fs::create_directories(base);
  const fs::path out = base / ("out" + std::to_string(seq));
  const fs::path err = base / ("err" + std::to_string(seq));
  ++seq;
  std::string cmd;
  if (!epoch.empty()) cmd += "UAVF_TEST_EPOCH=" + epoch + " ";
  cmd += std::string(UAVF_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

struct TempCase {
  fs::path dir;
  explicit TempCase(const std::string& tag) {
    dir = fs::temp_directory_path() /
          ("uavf_case_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fixtures::make_case_dir(dir);
  }
  ~TempCase() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("range subcommand reproduces the worked example from flags", "[cli]") {
  const auto r = run_cli(
      "range --capacity-mah 6500 --full-v 16.8 --empty-v 13.55 --observed-v 16.2 "
      "--motor-w 94 --motors 4 --avionics-w 5 --cruise-mps 2");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("220.5") != std::string::npos);
  CHECK(r.out.find("441") != std::string::npos);
}

TEST_CASE("log subcommand fails cleanly on a bad-magic file", "[cli]") {
  TempCase c("badmagic");
  fixtures::write_text(c.dir / "flight_log" / "bogus.ulg", "this is not a ulog file");
  // Two logs now exist; remove the valid one so the bad file is analyzed.
  fs::remove(c.dir / "flight_log" / "log_0481.ulg");

  const auto r = run_cli("log --case " + c.dir.string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("bogus.ulg") != std::string::npos);
}

TEST_CASE("ingest builds and verifies the custody manifest", "[cli]") {
  TempCase c("ingest");
  const auto r = run_cli("ingest --case " + c.dir.string() + " --case-id case-xyz",
                         "2023-03-01T00:00:00Z");
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(c.dir / "manifest.json"));
  const std::string manifest = slurp(c.dir / "manifest.json");
  CHECK(manifest.find("\"case_id\": \"case-xyz\"") != std::string::npos);
  CHECK(manifest.find("log_0481.ulg") != std::string::npos);

  const auto v = run_cli("ingest --verify --case " + c.dir.string());
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("custody intact") != std::string::npos);

  // Tamper with one file: verification must call it out.
  fixtures::write_text(c.dir / "battery_observation" / "battery.json", "{}");
  const auto bad = run_cli("ingest --verify --case " + c.dir.string());
  CHECK(bad.out.find("hash_mismatch") != std::string::npos);
}

TEST_CASE("report produces the full artifact set", "[cli]") {
  TempCase c("report");
  run_cli("ingest --case " + c.dir.string(), "2023-03-01T00:00:00Z");
  const auto r = run_cli("report --case " + c.dir.string(), "2023-03-01T00:00:00Z");
  CHECK(r.exit_code == 0);

  const fs::path out = c.dir / "analysis";
  for (const char* name :
       {"report.json", "report.md", "log_0481.track.geojson", "log_0481.track.kml"}) {
    INFO(name);
    CHECK(fs::exists(out / name));
  }

  const std::string report = slurp(out / "report.json");
  CHECK(report.find("\"available\": true") != std::string::npos);
  CHECK(report.find("441") != std::string::npos);
  CHECK(report.find("NuttX, v11.0.0") != std::string::npos);

  // Media placemarks made it into the geo exports.
  CHECK(slurp(out / "log_0481.track.geojson").find("IMG_0001.JPG") != std::string::npos);
  CHECK(slurp(out / "log_0481.track.kml").find("IMG_0001.JPG") != std::string::npos);
}

TEST_CASE("report succeeds on partial evidence", "[cli]") {
  TempCase c("partial");
  fs::remove_all(c.dir / "flight_log");
  fs::remove_all(c.dir / "media_manifest");
  const auto r = run_cli("report --case " + c.dir.string(), "2023-03-01T00:00:00Z");
  CHECK(r.exit_code == 0);  // absence of evidence is a valid forensic result
  const std::string report = slurp(c.dir / "analysis" / "report.json");
  CHECK(report.find("\"available\": false") != std::string::npos);
}

TEST_CASE("re-running report rewrites byte-identical outputs", "[cli]") {
  TempCase c("idempotent");
  run_cli("ingest --case " + c.dir.string(), "2023-03-01T00:00:00Z");

  const std::string epoch = "2023-03-02T08:00:00Z";
  run_cli("report --case " + c.dir.string() + " --out " + (c.dir / "a").string(), epoch);
  run_cli("report --case " + c.dir.string() + " --out " + (c.dir / "b").string(), epoch);

  for (const char* name :
       {"report.json", "report.md", "log_0481.track.geojson", "log_0481.track.kml"}) {
    INFO(name);
    CHECK(slurp(c.dir / "a" / name) == slurp(c.dir / "b" / name));
    CHECK_FALSE(slurp(c.dir / "a" / name).empty());
  }
}

TEST_CASE("usage errors exit with code 1", "[cli]") {
  CHECK(run_cli("no-such-subcommand").exit_code == 1);
  CHECK(run_cli("track").exit_code == 1);               // missing --case
  CHECK(run_cli("range").exit_code == 1);               // neither case nor flags
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("report --help").exit_code == 0);
}

TEST_CASE("track subcommand writes summary and exports", "[cli]") {
  TempCase c("track");
  const auto r = run_cli("track --case " + c.dir.string(), "2023-03-01T00:00:00Z");
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(c.dir / "analysis" / "log_0481.summary.json"));
  const std::string summary = slurp(c.dir / "analysis" / "log_0481.summary.json");
  CHECK(summary.find("\"estimator\": \"EKF2\"") != std::string::npos);
}

TEST_CASE("params subcommand lists the documented findings", "[cli]") {
  TempCase c("params");
  const auto r = run_cli("params --case " + c.dir.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("ARM_WITHOUT_GPS") != std::string::npos);
  CHECK(r.out.find("OBSTACLE_AVOIDANCE_OFF") != std::string::npos);
  CHECK(fs::exists(c.dir / "analysis" / "findings.json"));
}

TEST_CASE("media subcommand geotags against the derived alignment", "[cli]") {
  TempCase c("media");
  const auto r = run_cli("media --case " + c.dir.string());
  CHECK(r.exit_code == 0);
  const std::string tags = slurp(c.dir / "analysis" / "geotags.json");
  CHECK(tags.find("IMG_0001.JPG") != std::string::npos);
  CHECK(tags.find("interpolated") != std::string::npos);
  CHECK(tags.find("out_of_flight") != std::string::npos);
  CHECK(tags.find("time_utc_usec") != std::string::npos);  // alignment source reported
}
