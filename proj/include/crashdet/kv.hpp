#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crashdet {

/// Ordered flat `key=value` document: configs, run manifests, fitted models
/// and evaluation reports. Lines starting with '#' and blank lines are
/// ignored; keys are unique; whitespace around keys and values is trimmed.
class KvDocument {
 public:
  using Entry = std::pair<std::string, std::string>;

  /// Replaces the value of an existing key in place or appends a new one.
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, std::size_t value);
  void set(std::string key, bool value);

  bool contains(std::string_view key) const noexcept;
  std::optional<std::string> get(std::string_view key) const;

  /// The accessors below throw ConfigError naming the key when it is missing
  /// or malformed.
  const std::string& require(std::string_view key) const;
  double require_double(std::string_view key) const;
  std::size_t require_size(std::string_view key) const;
  bool require_bool(std::string_view key) const;

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  static KvDocument parse(std::istream& in);
  static KvDocument load(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  void save(const std::filesystem::path& path) const;

  bool operator==(const KvDocument&) const = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace crashdet
