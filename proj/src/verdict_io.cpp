#include "crashdet/verdict_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

namespace {

bool parse_bit(std::string_view token, bool& out) {
  const auto t = trim(token);
  if (t == "0") {
    out = false;
    return true;
  }
  if (t == "1") {
    out = true;
    return true;
  }
  return false;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  writer(out);
  if (!out) throw DataError("I/O error writing " + path.string());
}

}  // namespace

void write_verdicts(std::span<const DetectorVerdict> verdicts, DetectorId detector, std::ostream& out) {
  out << "t[s],flag,ready;detector=" << to_string(detector) << '\n';
  for (const auto& v : verdicts)
    out << format_number(v.t) << ',' << (v.flag ? '1' : '0') << ',' << (v.ready ? '1' : '0') << '\n';
}

void write_scores(std::span<const DetectorVerdict> verdicts, DetectorId detector, std::ostream& out) {
  out << "t[s],score,aux;detector=" << to_string(detector) << '\n';
  for (const auto& v : verdicts)
    out << format_number(v.t) << ',' << format_number(v.score) << ',' << format_number(v.aux) << '\n';
}

std::vector<DetectorVerdict> read_verdicts(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("missing verdict header", 1);
  const auto semi = line.find(';');
  if (trim(std::string_view(line).substr(0, semi)) != "t[s],flag,ready")
    throw ParseError("not a verdict stream (expected header t[s],flag,ready)", 1);
  DetectorId detector = DetectorId::cepstral;
  if (semi != std::string::npos) {
    const auto field = trim(std::string_view(line).substr(semi + 1));
    if (field.substr(0, 9) != "detector=") throw ParseError("malformed header field", 1);
    try {
      detector = parse_detector_id(field.substr(9));
    } catch (const ConfigError& e) {
      throw ParseError(e.what(), 1, "detector");
    }
  }

  std::vector<DetectorVerdict> verdicts;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto c1 = text.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(',', c1 + 1);
    if (c2 == std::string_view::npos || text.find(',', c2 + 1) != std::string_view::npos)
      throw ParseError("expected t,flag,ready", line_no);
    DetectorVerdict v;
    v.detector = detector;
    if (!parse_double(text.substr(0, c1), v.t) || !std::isfinite(v.t))
      throw ParseError("malformed time", line_no, "t");
    if (!parse_bit(text.substr(c1 + 1, c2 - c1 - 1), v.flag)) throw ParseError("flag must be 0 or 1", line_no, "flag");
    if (!parse_bit(text.substr(c2 + 1), v.ready)) throw ParseError("ready must be 0 or 1", line_no, "ready");
    if (!verdicts.empty() && !(v.t > verdicts.back().t)) throw ParseError("non-monotone timestamp", line_no, "t");
    verdicts.push_back(v);
  }
  return verdicts;
}

void write_verdicts(std::span<const DetectorVerdict> verdicts, DetectorId detector,
                    const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_verdicts(verdicts, detector, out); });
}

void write_scores(std::span<const DetectorVerdict> verdicts, DetectorId detector,
                  const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { write_scores(verdicts, detector, out); });
}

std::vector<DetectorVerdict> read_verdicts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open verdict stream " + path.string());
  return read_verdicts(in);
}

}  // namespace crashdet
