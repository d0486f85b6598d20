#include "crashdet/kv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "crashdet/errors.hpp"
#include "crashdet/format.hpp"

namespace crashdet {

namespace {

void check_key(std::string_view key) {
  if (key.empty() || key.find_first_of("=\n\r#") != std::string_view::npos || trim(key) != key)
    throw ConfigError("invalid key '" + std::string(key) + "'");
}

void check_value(std::string_view value) {
  if (value.find_first_of("\n\r") != std::string_view::npos || trim(value) != value)
    throw ConfigError("value '" + std::string(value) + "' contains line breaks or surrounding whitespace");
}

}  // namespace

void KvDocument::set(std::string key, std::string value) {
  check_key(key);
  check_value(value);
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
  if (it != entries_.end())
    it->second = std::move(value);
  else
    entries_.emplace_back(std::move(key), std::move(value));
}

void KvDocument::set(std::string key, double value) { set(std::move(key), format_number(value)); }
void KvDocument::set(std::string key, std::size_t value) { set(std::move(key), std::to_string(value)); }
void KvDocument::set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }

bool KvDocument::contains(std::string_view key) const noexcept {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.first == key; });
}

std::optional<std::string> KvDocument::get(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& KvDocument::require(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw ConfigError("missing key '" + std::string(key) + "'");
}

double KvDocument::require_double(std::string_view key) const {
  const auto& text = require(key);
  double v = 0.0;
  if (!parse_double(text, v) || !std::isfinite(v))
    throw ConfigError("key '" + std::string(key) + "' is not a finite number: '" + text + "'");
  return v;
}

std::size_t KvDocument::require_size(std::string_view key) const {
  const auto& text = require(key);
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError("key '" + std::string(key) + "' is not a non-negative integer: '" + text + "'");
  return v;
}

bool KvDocument::require_bool(std::string_view key) const {
  const auto& text = require(key);
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError("key '" + std::string(key) + "' is not true/false: '" + text + "'");
}

KvDocument KvDocument::parse(std::istream& in) {
  KvDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    const std::string key(trim(text.substr(0, eq)));
    const std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no);
    if (doc.contains(key)) throw ParseError("duplicate key '" + key + "'", line_no, key);
    doc.entries_.emplace_back(key, value);
  }
  return doc;
}

KvDocument KvDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse(in);
}

void KvDocument::write(std::ostream& out) const {
  for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

void KvDocument::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
  if (!out) throw DataError("I/O error writing " + path.string());
}

}  // namespace crashdet
