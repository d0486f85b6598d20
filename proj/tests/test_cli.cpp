#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "crashdet/kv.hpp"
#include "crashdet/trace.hpp"

namespace fs = std::filesystem;
using namespace crashdet;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run crashdet_run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("crashdet-cli-" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string operator/(const std::string& leaf) const { return (root / leaf).string(); }
};

/// 60 s cautious ride with one lowside crash at 20 s.
std::string simulate_ride(const Workspace& ws, const std::string& dir = "sim") {
  const auto r = crashdet_run({"simulate", "--seed", "9", "--duration", "60", "--crash", "lowside@20:8", "--out-dir",
                               ws / dir});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  return (ws.root / dir / "ride.csv").string();
}

}  // namespace

TEST_CASE("simulate is deterministic") {
  Workspace ws("simulate");
  const auto a = simulate_ride(ws, "a");
  const auto b = simulate_ride(ws, "b");
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(ws / "a/ride.events") == "# kind,start_t,duration\ncrash,20,8\n");
  const auto manifest = KvDocument::load(ws / "a/simulate.manifest");
  CHECK(manifest.require("format") == "crashdet-manifest/1");
  CHECK(manifest.require("seed") == "9");
  CHECK(manifest.require("resolved.effective_window_s") == "10.24");
}

TEST_CASE("usage errors exit with the configuration code") {
  Workspace ws("usage");
  CHECK(crashdet_run({}).code == cli::kExitConfig);
  CHECK(crashdet_run({"launch"}).code == cli::kExitConfig);
  CHECK(crashdet_run({"simulate", "--duration", "5", "--out-dir", ws / "x"}).code == cli::kExitConfig);
  CHECK(crashdet_run({"simulate", "--suite", "--crash", "lowside@20", "--out-dir", ws / "x"}).code ==
        cli::kExitConfig);
  CHECK(crashdet_run({"simulate", "--crash", "wheelie@20", "--out-dir", ws / "x"}).code == cli::kExitConfig);
  CHECK(crashdet_run({"detect", "--trace", ws / "absent.csv", "--out-dir", ws / "x"}).code == cli::kExitConfig);
  CHECK(crashdet_run({"simulate", "--help"}).code == cli::kExitOk);
}

TEST_CASE("config file with the reference settings is echoed in the manifest") {
  Workspace ws("config");
  const auto trace = simulate_ride(ws);
  spit(ws / "reference.cfg", "# cepstral detector\nwindow-seconds = 10\nsample-rate = 100\ngamma = 0.029\nhop = 1\n");
  const auto r = crashdet_run({"detect", "--config", ws / "reference.cfg", "--trace", trace, "--out-dir", ws / "det"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto m = KvDocument::load(ws / "det/detect.manifest");
  CHECK(m.require("gamma") == "0.029");
  CHECK(m.require("window-seconds") == "10");
  CHECK(m.require("resolved.window_samples") == "1024");
  CHECK(m.require("resolved.effective_window_s") == "10.24");
  CHECK(fs::exists(ws / "det/ride.cepstral.verdicts.csv"));
}

TEST_CASE("command-line options override the config file") {
  Workspace ws("override");
  const auto trace = simulate_ride(ws);
  spit(ws / "c.cfg", "gamma = 5\nhop = 10\n");
  const auto r = crashdet_run(
      {"detect", "--config", ws / "c.cfg", "--gamma=0.5", "--trace", trace, "--out-dir", ws / "det"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto m = KvDocument::load(ws / "det/detect.manifest");
  CHECK(m.require("gamma") == "0.5");
  CHECK(m.require("hop") == "10");

  spit(ws / "bad.cfg", "gama = 5\n");
  CHECK(crashdet_run({"detect", "--config", ws / "bad.cfg", "--trace", trace, "--out-dir", ws / "det"}).code ==
        cli::kExitConfig);
  spit(ws / "other.cfg", "command = simulate\n");
  CHECK(crashdet_run({"detect", "--config", ws / "other.cfg", "--trace", trace, "--out-dir", ws / "det"}).code ==
        cli::kExitConfig);
}

TEST_CASE("a manifest fed back reproduces the run byte for byte") {
  Workspace ws("rerun");
  const auto trace = simulate_ride(ws);
  const auto first_trace = slurp(trace);
  const auto first_manifest = slurp(ws / "sim/simulate.manifest");
  const auto r = crashdet_run({"simulate", "--config", ws / "sim/simulate.manifest"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(slurp(trace) == first_trace);
  CHECK(slurp(ws / "sim/simulate.manifest") == first_manifest);

  REQUIRE(crashdet_run({"detect", "--trace", trace, "--emit-scores", "--out-dir", ws / "det"}).code == 0);
  const auto scores = slurp(ws / "det/ride.cepstral.scores.csv");
  const auto detect_manifest = slurp(ws / "det/detect.manifest");
  REQUIRE(crashdet_run({"detect", "--config", ws / "det/detect.manifest"}).code == 0);
  CHECK(slurp(ws / "det/ride.cepstral.scores.csv") == scores);
  CHECK(slurp(ws / "det/detect.manifest") == detect_manifest);
}

TEST_CASE("a silent sensor raises no flags") {
  Workspace ws("zero");
  TraceFile tr;
  for (int i = 0; i < 3000; ++i) tr.rows.push_back({i / 100.0, 0, 0, 0, 0, 0, std::nullopt});
  write_trace(tr, fs::path(ws / "zero.csv"));
  const auto r = crashdet_run({"detect", "--trace", ws / "zero.csv", "--emit-scores", "--out-dir", ws / "det"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto v = lines(slurp(ws / "det/zero.cepstral.verdicts.csv"));
  REQUIRE(v.size() == 3001);
  CHECK(v[0] == "t[s],flag,ready;detector=cepstral");
  for (std::size_t i = 1; i < v.size(); ++i) REQUIRE(v[i].find(",0,") != std::string::npos);
  CHECK(v[1024].substr(v[1024].size() - 2) == ",1");
  CHECK(v[1023].substr(v[1023].size() - 2) == ",0");
}

TEST_CASE("chunked input agrees with a single pass once the second window is full") {
  Workspace ws("chunks");
  const auto trace = parse_trace(simulate_ride(ws));
  TraceFile a = trace;
  TraceFile b = trace;
  a.labels.clear();
  b.labels.clear();
  a.rows.assign(trace.rows.begin(), trace.rows.begin() + 3000);
  b.rows.assign(trace.rows.begin() + 3000, trace.rows.end());
  write_trace(a, fs::path(ws / "first.csv"));
  write_trace(b, fs::path(ws / "second.csv"));
  REQUIRE(crashdet_run({"detect", "--trace", ws / "sim/ride.csv", "--trace", ws / "first.csv", "--trace",
                        ws / "second.csv", "--emit-scores", "--out-dir", ws / "det"})
              .code == 0);
  const auto whole = lines(slurp(ws / "det/ride.cepstral.scores.csv"));
  const auto second = lines(slurp(ws / "det/second.cepstral.scores.csv"));
  REQUIRE(second.size() == b.rows.size() + 1);
  for (std::size_t i = 1024; i < second.size(); ++i) REQUIRE(second[i] == whole[3000 + i]);
  CHECK(lines(slurp(ws / "det/first.cepstral.scores.csv"))[1500] == whole[1500]);
}

TEST_CASE("sample-rate mismatch is a configuration error") {
  Workspace ws("fs");
  const auto trace = simulate_ride(ws);
  const auto r = crashdet_run({"detect", "--trace", trace, "--sample-rate", "50", "--out-dir", ws / "det"});
  CHECK(r.code == cli::kExitConfig);
  CHECK(r.err.find("fs=100") != std::string::npos);
}

TEST_CASE("calibrate from envelope files") {
  Workspace ws("calibrate");
  spit(ws / "env.kv",
       "format=crashdet-calibration/1\ntraces=2\n"
       "trace.1.name=nominal\ntrace.1.nominal_max=0.027\ntrace.1.crash_peaks=none\n"
       "trace.2.name=crash\ntrace.2.nominal_max=none\ntrace.2.crash_peaks=0.031,0.035\n");
  auto r = crashdet_run({"calibrate", "--envelopes", ws / "env.kv", "--out-dir", ws / "cal"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto doc = KvDocument::load(ws / "cal/calibration.kv");
  CHECK(doc.require("gamma") == "0.029");
  CHECK(doc.require("feasible") == "true");
  CHECK(doc.require_double("gamma") == 0.029);

  spit(ws / "nominal.kv", "traces=1\ntrace.1.name=n\ntrace.1.nominal_max=0.027\ntrace.1.crash_peaks=none\n");
  CHECK(crashdet_run({"calibrate", "--envelopes", ws / "nominal.kv", "--out-dir", ws / "cal2"}).code ==
        cli::kExitConfig);

  spit(ws / "overlap.kv",
       "traces=2\ntrace.1.name=n\ntrace.1.nominal_max=0.031\ntrace.1.crash_peaks=none\n"
       "trace.2.name=c\ntrace.2.nominal_max=none\ntrace.2.crash_peaks=0.027\n");
  r = crashdet_run({"calibrate", "--envelopes", ws / "overlap.kv", "--out-dir", ws / "cal3"});
  CHECK(r.code == cli::kExitData);
  CHECK(KvDocument::load(ws / "cal3/calibration.kv").require("feasible") == "false");
}

TEST_CASE("evaluate a verdict stream against a label file") {
  Workspace ws("evaluate");
  std::string text = "t[s],flag,ready;detector=threshold\n";
  for (int i = 0; i < 60; ++i) {
    const bool on = (i >= 5 && i <= 6) || (i >= 22 && i <= 26) || (i >= 45 && i <= 47);
    text += std::to_string(i) + "," + (on ? "1" : "0") + ",1\n";
  }
  spit(ws / "run.verdicts.csv", text);
  spit(ws / "run.events", "# kind,start_t,duration\ncrash,20,5\n");
  auto r = crashdet_run({"evaluate", "--verdicts", ws / "run.verdicts.csv", "--labels", ws / "run.events",
                         "--sample-rate", "1", "--pad", "4", "--out-dir", ws / "ev"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto doc = KvDocument::load(ws / "ev/threshold.report");
  CHECK(doc.require("events_detected") == "1");
  CHECK(doc.require("event.1.latency_s") == "2");
  CHECK(doc.require("false_positive_episodes") == "2");
  CHECK(doc.require("flag_consistency_s") == "5");

  r = crashdet_run({"evaluate", "--verdicts", ws / "run.verdicts.csv", "--sample-rate", "1", "--pad", "4",
                    "--out-dir", ws / "ev2"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  doc = KvDocument::load(ws / "ev2/threshold.report");
  CHECK(doc.require("events") == "0");
  CHECK(doc.require("false_positive_episodes") == "3");

  CHECK(crashdet_run({"evaluate", "--verdicts", ws / "run.verdicts.csv", "--out-dir", ws / "ev3"}).code ==
        cli::kExitData);
}

TEST_CASE("fit, detect all and compare") {
  Workspace ws("all");
  const auto trace = simulate_ride(ws);
  CHECK(crashdet_run({"detect", "--trace", trace, "--detector", "all", "--out-dir", ws / "det"}).code ==
        cli::kExitConfig);
  auto r = crashdet_run({"fit", "--trace", trace, "--out-dir", ws / "fit"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto model = KvDocument::load(ws / "fit/mahalanobis.model");
  CHECK(model.require("format") == "crashdet-mahalanobis/1");
  CHECK(model.require("dimension") == "5");

  r = crashdet_run({"detect", "--trace", trace, "--detector", "all", "--model", ws / "fit/mahalanobis.model",
                    "--out-dir", ws / "det"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* det : {"cepstral", "threshold", "mahalanobis"})
    CHECK(fs::exists(ws / ("det/ride." + std::string(det) + ".verdicts.csv")));

  r = crashdet_run({"evaluate", "--trace", trace, "--verdict-dir", ws / "det", "--detector", "all", "--out-dir",
                    ws / "ev"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const char* det : {"cepstral", "threshold", "mahalanobis"}) {
    const auto doc = KvDocument::load(ws / ("ev/" + std::string(det) + ".report"));
    CHECK(doc.require("detector") == det);
    CHECK(doc.require("events") == "1");
  }
  const auto cmp = KvDocument::load(ws / "ev/comparison.report");
  CHECK(cmp.require("format") == "crashdet-comparison/1");
  CHECK(cmp.contains("mahalanobis.false_positive_episodes"));
}
