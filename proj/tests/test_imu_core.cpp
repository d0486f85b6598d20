#include <doctest.h>

#include <cmath>
#include <limits>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"
#include "crashdet/imu.hpp"
#include "crashdet/window_buffer.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace crashdet;

TEST_CASE("norms over the measured channels") {
  ImuSample s;
  s.ax = 3.0;
  s.ay = 4.0;
  s.az = 12.0;
  s.wx = 0.6;
  s.wz = 0.8;
  CHECK(accel_norm(s) == 13.0);
  CHECK(gyro_norm_xz(s) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("require_finite names the offending channel") {
  ImuSample s;
  s.t = 2.5;
  require_finite(s);
  s.wx = std::numeric_limits<double>::quiet_NaN();
  try {
    require_finite(s);
    FAIL("expected NonFiniteSampleError");
  } catch (const NonFiniteSampleError& e) {
    CHECK(e.channel() == "wx");
    CHECK(e.time() == 2.5);
  }
  s.wx = 0.0;
  s.ay = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(require_finite(s), NonFiniteSampleError);
}

TEST_CASE("speed is optional and carried through equality") {
  ImuSample a;
  ImuSample b;
  CHECK(a == b);
  b.speed = 12.0;
  CHECK_FALSE(a == b);
}

TEST_CASE("events") {
  CHECK(parse_event_kind("crash") == EventKind::crash);
  CHECK(parse_event_kind("none") == EventKind::none);
  CHECK_THROWS_AS(parse_event_kind("fall"), ConfigError);
  CHECK(TraceEvent{EventKind::crash, 10.0, 4.0}.end_t() == 14.0);
  CHECK_THROWS_AS(validate(TraceEvent{EventKind::crash, 1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(validate(TraceEvent{EventKind::crash, 1.0, -1.0}), ConfigError);
  validate(TraceEvent{EventKind::none, 1.0, 0.0});
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(9.8056) == "9.8056");
  CHECK(format_exact(0.1) == "0.10000000000000001");
  double v = 0.0;
  CHECK(parse_double(" 2.5 ", v));
  CHECK(v == 2.5);
  CHECK_FALSE(parse_double("2.5x", v));
  CHECK_FALSE(parse_double("", v));
  CHECK(parse_double("nan", v));
  CHECK(std::isnan(v));
}

TEST_CASE("window buffer warm-up and eviction") {
  WindowBuffer buf(2, 4);
  CHECK_THROWS_AS(buf.snapshot(), NotReadyError);
  for (int i = 0; i < 3; ++i) CHECK_FALSE(buf.push(i * 0.01, std::vector<double>{double(i), -double(i)}));
  CHECK(buf.fill() == 3);
  CHECK(buf.push(0.03, std::vector<double>{3.0, -3.0}));
  CHECK(buf.push(0.04, std::vector<double>{4.0, -4.0}));
  const auto w = buf.snapshot();
  CHECK(w.rows() == 2);
  CHECK(w.cols() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(w(0, k) == double(k + 1));
    CHECK(w(1, k) == -double(k + 1));
  }
  CHECK(buf.oldest_time() == 0.01);
  CHECK(buf.newest_time() == 0.04);
  buf.clear();
  CHECK(buf.fill() == 0);
  CHECK_THROWS_AS(buf.snapshot(), NotReadyError);
}

TEST_CASE("window buffer rejects non-finite samples without side effects") {
  WindowBuffer buf(5, 8);
  ImuSample s;
  for (int i = 0; i < 8; ++i) {
    s.t = i;
    s.ax = i;
    buf.push(s);
  }
  const auto before = buf.snapshot();
  s.t = 8;
  s.wz = std::numeric_limits<double>::quiet_NaN();
  try {
    buf.push(s);
    FAIL("expected NonFiniteSampleError");
  } catch (const NonFiniteSampleError& e) {
    CHECK(e.channel() == "wz");
  }
  CHECK(buf.snapshot() == before);
  CHECK(buf.newest_time() == 7.0);
  CHECK_THROWS_AS(buf.push(0.0, std::vector<double>{1.0, 2.0}), DimensionError);
}

TEST_CASE("window buffer matches a deque-of-rows oracle") {
  gen::Gen g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t p = 1 + g.index(6);
    const std::size_t cap = 1 + g.index(40);
    WindowBuffer buf(p, cap);
    oracle::ListRing ring(cap);
    const std::size_t pushes = g.index(3 * cap + 5);
    for (std::size_t i = 0; i < pushes; ++i) {
      std::vector<double> row(p);
      for (auto& v : row) v = g.normal();
      const bool full = buf.push(double(i), row);
      ring.push(row);
      REQUIRE(full == ring.full());
    }
    if (ring.full()) {
      const auto snap = buf.snapshot();
      const auto expect = ring.snapshot();
      REQUIRE(std::vector<double>(snap.data().begin(), snap.data().end()) == expect);
      std::vector<double> into(p * cap);
      buf.snapshot_into(into);
      REQUIRE(into == expect);
    }
  }
}
