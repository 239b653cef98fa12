#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "spaceform/errors.hpp"
#include "spaceform/linalg.hpp"

namespace spaceform::cli {

/// Bad or missing configuration entry; maps to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Sectioned key = value configuration. Keys are addressed as "section.key".
/// Every lookup records the value actually used, defaults included, so the
/// resolved configuration can be embedded in reports.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;

  std::string text(const std::string& key, std::optional<std::string> fallback = {}) const;
  double number(const std::string& key, std::optional<double> fallback = {}) const;
  /// Like number() but rejects values <= 0.
  double positive(const std::string& key, std::optional<double> fallback = {}) const;
  int integer(const std::string& key, std::optional<int> fallback = {}) const;
  bool flag(const std::string& key, std::optional<bool> fallback = {}) const;
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = {}) const;
  std::vector<std::string> words(const std::string& key,
                                 std::optional<std::vector<std::string>> fallback = {}) const;
  /// Comma-separated complex constants such as "0.5, 0.1 + 0.2*i".
  CVec point(const std::string& key, int n, std::optional<CVec> fallback = {}) const;

  /// Records an override (used for --seed).
  void set(const std::string& key, const std::string& value);

  /// Resolved entries in lookup order, grouped by section.
  nlohmann::ordered_json resolved() const { return resolved_; }

 private:
  std::optional<std::string> raw(const std::string& key) const;
  void record(const std::string& key, nlohmann::ordered_json value) const;

  boost::property_tree::ptree tree_;
  mutable nlohmann::ordered_json resolved_ = nlohmann::ordered_json::object();
};

std::vector<std::string> split_list(std::string_view text);

}  // namespace spaceform::cli
