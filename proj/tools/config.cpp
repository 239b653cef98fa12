#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>

#include "spaceform/expr.hpp"

namespace spaceform::cli {

namespace {

std::string unquote(std::string s) {
  boost::algorithm::trim(s);
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    s = s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw ConfigError("'" + key + "': expected a number, got '" + s + "'");
  return v;
}

// The section is everything before the last dot, so "loop.a.coord" is key
// "coord" of section [loop.a].
std::pair<std::string, std::string> split_key(const std::string& key) {
  const auto dot = key.rfind('.');
  if (dot == std::string::npos) return {"", key};
  return {key.substr(0, dot), key.substr(dot + 1)};
}

boost::property_tree::ptree::path_type tree_path(const std::string& key) {
  auto [section, name] = split_key(key);
  return {section.empty() ? name : section + '\x1f' + name, '\x1f'};
}

}  // namespace

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(unquote(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!unquote(cur).empty() || !out.empty()) out.push_back(unquote(cur));
  return out;
}

Config Config::parse(std::string_view text) {
  Config c;
  std::istringstream in{std::string(text)};
  try {
    boost::property_tree::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> Config::raw(const std::string& key) const {
  auto v = tree_.get_optional<std::string>(tree_path(key));
  if (!v) return std::nullopt;
  return unquote(*v);
}

bool Config::has(const std::string& key) const { return raw(key).has_value(); }

void Config::record(const std::string& key, nlohmann::ordered_json value) const {
  auto [section, name] = split_key(key);
  if (section.empty())
    resolved_[name] = std::move(value);
  else
    resolved_[section][name] = std::move(value);
}

void Config::set(const std::string& key, const std::string& value) { tree_.put(tree_path(key), value); }

std::string Config::text(const std::string& key, std::optional<std::string> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  std::string out = v ? *v : *fallback;
  record(key, out);
  return out;
}

double Config::number(const std::string& key, std::optional<double> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  const double out = v ? to_double(key, *v) : *fallback;
  record(key, out);
  return out;
}

double Config::positive(const std::string& key, std::optional<double> fallback) const {
  const double v = number(key, fallback);
  if (!(v > 0.0)) throw ConfigError("'" + key + "' must be positive");
  return v;
}

int Config::integer(const std::string& key, std::optional<int> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  int out = 0;
  if (v) {
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size())
      throw ConfigError("'" + key + "': expected an integer, got '" + *v + "'");
  } else {
    out = *fallback;
  }
  record(key, out);
  return out;
}

bool Config::flag(const std::string& key, std::optional<bool> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  bool out = fallback.value_or(false);
  if (v) {
    if (*v == "true" || *v == "yes" || *v == "1")
      out = true;
    else if (*v == "false" || *v == "no" || *v == "0")
      out = false;
    else
      throw ConfigError("'" + key + "': expected true or false, got '" + *v + "'");
  }
  record(key, out);
  return out;
}

std::vector<double> Config::numbers(const std::string& key,
                                    std::optional<std::vector<double>> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  std::vector<double> out;
  if (v)
    for (const auto& item : split_list(*v)) out.push_back(to_double(key, item));
  else
    out = *fallback;
  record(key, out);
  return out;
}

std::vector<std::string> Config::words(const std::string& key,
                                       std::optional<std::vector<std::string>> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  std::vector<std::string> out = v ? split_list(*v) : *fallback;
  record(key, out);
  return out;
}

CVec Config::point(const std::string& key, int n, std::optional<CVec> fallback) const {
  auto v = raw(key);
  if (!v && !fallback) throw ConfigError("missing required entry '" + key + "'");
  CVec out;
  if (v) {
    const auto items = split_list(*v);
    if (static_cast<int>(items.size()) != n)
      throw ConfigError("'" + key + "' needs " + std::to_string(n) + " coordinates");
    out.resize(n);
    for (int i = 0; i < n; ++i) {
      const Expr e = Expr::parse(items[static_cast<std::size_t>(i)]);
      if (e.max_variable() != 0) throw ConfigError("'" + key + "': coordinates must be constants");
      out[i] = e.eval(std::span<const cplx>());
    }
  } else {
    out = *fallback;
  }
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < out.size(); ++i) arr.push_back({out[i].real(), out[i].imag()});
  record(key, arr);
  return out;
}

}  // namespace spaceform::cli
