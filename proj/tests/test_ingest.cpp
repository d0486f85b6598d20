#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "crashdet/errors.hpp"
#include "crashdet/trace.hpp"
#include "support/generators.hpp"

using namespace crashdet;

namespace {

TraceFile from_text(const std::string& text) {
  std::istringstream in(text);
  return read_trace(in);
}

std::string to_text(const TraceFile& tr) {
  std::ostringstream out;
  write_trace(tr, out);
  return out.str();
}

ParseError parse_error(const std::string& text) {
  try {
    from_text(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected ParseError");
  return ParseError("", 0);
}

const std::string kHeader = "t[s],ax[m/s^2],ay[m/s^2],az[m/s^2],wx[rad/s],wz[rad/s];fs=100";

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const char* name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("three rows survive a round trip") {
  const std::string text = kHeader +
                           "\n0,0.1,0.2,9.8,0.01,0.02\n"
                           "0.01,0.3,-0.2,9.7,0.05,-0.02\n"
                           "0.02,-0.1,0.25,9.9,0,0.125\n";
  const auto tr = from_text(text);
  REQUIRE(tr.rows.size() == 3);
  CHECK(tr.header.sample_rate == 100.0);
  CHECK_FALSE(tr.header.has_speed);
  CHECK(tr.rows[1].ax == 0.3);
  CHECK(tr.rows[2].wz == 0.125);
  CHECK(to_text(tr) == text);
}

TEST_CASE("writer header is stable") {
  TraceFile tr;
  tr.header.has_speed = true;
  tr.header.metadata = {{"generator", "unit"}, {"seed", "4"}};
  tr.rows.push_back({0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
  CHECK(to_text(tr) ==
        "t[s],ax[m/s^2],ay[m/s^2],az[m/s^2],wx[rad/s],wz[rad/s],speed[m/s];fs=100;generator=unit;seed=4\n"
        "0,1,2,3,4,5,6\n");
  tr.header.metadata.push_back({"note", "a;b"});
  CHECK_THROWS_AS(to_text(tr), ConfigError);
}

TEST_CASE("NaN is reported with line and column") {
  const auto e = parse_error(kHeader + "\n0,nan,0,9.8,0,0\n");
  CHECK(e.line() == 2);
  CHECK(e.column() == "ax");
  CHECK(std::string(e.what()).find("line 2") != std::string::npos);
}

TEST_CASE("malformed inputs are rejected") {
  SUBCASE("unit mismatch") {
    const auto e = parse_error("t[s],ax[g],ay[m/s^2],az[m/s^2],wx[rad/s],wz[rad/s];fs=100\n");
    CHECK(e.line() == 1);
    CHECK(e.column() == "ax");
  }
  SUBCASE("missing column") {
    const auto e = parse_error("t[s],ax[m/s^2],ay[m/s^2],az[m/s^2],wx[rad/s];fs=100\n");
    CHECK(e.column() == "wz");
  }
  SUBCASE("duplicate column") {
    CHECK(parse_error("t[s],ax[m/s^2],ax[m/s^2],ay[m/s^2],az[m/s^2],wx[rad/s],wz[rad/s];fs=100\n").column() == "ax");
  }
  SUBCASE("no sample rate") { CHECK(parse_error("t[s],ax[m/s^2],ay[m/s^2],az[m/s^2],wx[rad/s],wz[rad/s]\n").line() == 1); }
  SUBCASE("non-monotone time") {
    const auto e = parse_error(kHeader + "\n0,0,0,0,0,0\n0.01,0,0,0,0,0\n0.01,0,0,0,0,0\n");
    CHECK(e.line() == 4);
    CHECK(e.column() == "t");
  }
  SUBCASE("jitter beyond one percent") {
    CHECK(parse_error(kHeader + "\n0,0,0,0,0,0\n0.0102,0,0,0,0,0\n").line() == 3);
    CHECK(from_text(kHeader + "\n0,0,0,0,0,0\n0.01009,0,0,0,0,0\n").rows.size() == 2);
  }
  SUBCASE("malformed number") {
    const auto e = parse_error(kHeader + "\n0,0,0,abc,0,0\n");
    CHECK(e.column() == "az");
  }
  SUBCASE("wrong field count") { CHECK(parse_error(kHeader + "\n0,0,0,0,0\n").line() == 2); }
  SUBCASE("empty file") { CHECK(parse_error("").line() == 1); }
}

TEST_CASE("columns may be permuted and unknown columns are ignored") {
  const auto tr = from_text(
      "wz[rad/s],temp[C],t[s],speed[m/s],az[m/s^2],ay[m/s^2],ax[m/s^2],wx[rad/s];fs=50;rig=bench\n"
      "0.5,21,0,12,9.8,0.2,0.1,0.4\n"
      "0.6,21,0.02,13,9.7,0.3,0.2,0.5\n");
  REQUIRE(tr.rows.size() == 2);
  CHECK(tr.header.sample_rate == 50.0);
  CHECK(tr.header.has_speed);
  CHECK(tr.header.metadata == std::vector<std::pair<std::string, std::string>>{{"rig", "bench"}});
  const ImuSample want{0.02, 0.2, 0.3, 9.7, 0.5, 0.6, 13.0};
  CHECK(tr.rows[1] == want);
}

TEST_CASE("header-only and single-sample traces") {
  CHECK(from_text(kHeader + "\n").rows.empty());
  const auto one = from_text(kHeader + "\n5,0,0,9.8,0,0\n");
  REQUIRE(one.rows.size() == 1);
  CHECK(one.rows[0].t == 5.0);
  CHECK(one.duration() == 0.0);
}

TEST_CASE("parse(write(x)) == quantized(x)") {
  gen::Gen g(40);
  for (int trial = 0; trial < 200; ++trial) {
    const double fs = g.pick(std::vector<double>{50.0, 100.0, 200.0, 400.0});
    const auto tr = gen::trace(g, g.index(60), g.coin(), fs);
    const auto text = to_text(tr);
    const auto back = from_text(text);
    REQUIRE(back.header == tr.header);
    REQUIRE(back.rows == quantized(tr).rows);
    REQUIRE(to_text(back) == text);
  }
}

TEST_CASE("validate_trace mirrors the parser") {
  gen::Gen g(41);
  auto tr = gen::trace(g, 20, true);
  validate_trace(tr);
  tr.rows[5].speed.reset();
  CHECK_THROWS_AS(validate_trace(tr), ParseError);
  tr = gen::trace(g, 20, false);
  tr.rows[7].t += 0.5;
  try {
    validate_trace(tr);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 9);
  }
}

TEST_CASE("labels live in a sidecar next to the trace") {
  TempDir dir("crashdet-ingest-test");
  gen::Gen g(42);
  auto tr = gen::trace(g, 50, true);
  tr.labels = {{EventKind::crash, tr.rows[10].t, 2.5}, {EventKind::none, tr.rows[30].t, 0.0}};
  const auto path = dir.path / "ride.csv";
  write_trace(tr, path);
  CHECK(events_path_for(path) == dir.path / "ride.events");
  REQUIRE(std::filesystem::exists(dir.path / "ride.events"));
  const auto back = parse_trace(path);
  CHECK(back.rows == quantized(tr).rows);
  REQUIRE(back.labels.size() == 2);
  CHECK(back.labels[0].kind == EventKind::crash);
  CHECK(back.labels[1].kind == EventKind::none);

  std::filesystem::remove(dir.path / "ride.events");
  CHECK(parse_trace(path).labels.empty());
  CHECK_THROWS_AS(parse_trace(dir.path / "absent.csv"), DataError);
}

TEST_CASE("event files") {
  std::istringstream in("# kind,start_t,duration\ncrash,12.5,8\n\nnone,40,0\n");
  const auto events = read_events(in);
  REQUIRE(events.size() == 2);
  CHECK(events[0].start_t == 12.5);
  CHECK(events[0].duration == 8.0);
  std::ostringstream out;
  write_events(events, out);
  CHECK(out.str() == "# kind,start_t,duration\ncrash,12.5,8\nnone,40,0\n");

  std::istringstream bad("# kind,start_t,duration\nwheelie,1,2\n");
  try {
    read_events(bad);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == "kind");
  }
  std::istringstream zero("crash,1,0\n");
  CHECK_THROWS_AS(read_events(zero), ParseError);
}
