#include "csa/harness/config.hpp"

#include <charconv>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "csa/error.hpp"
#include "csa/io.hpp"

namespace csa::harness {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string &raw, const std::string &where) {
  const std::string s = trim(raw);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError(where + ": '" + s + "' is not a valid number");
  return v;
}

} // namespace

IniConfig IniConfig::from_string(const std::string &text) {
  IniConfig c;
  c.text_ = text;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, c.tree_);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto &sec : c.tree_)
    if (!sec.second.data().empty() && sec.second.empty())
      throw ConfigError("config: key '" + sec.first + "' outside any section");
  return c;
}

IniConfig IniConfig::from_file(const std::string &path) { return from_string(read_file(path)); }

void IniConfig::check_schema(const Schema &schema) const {
  for (const auto &sec : tree_) {
    const auto it = schema.find(sec.first);
    if (it == schema.end())
      throw ConfigError("config: unknown section [" + sec.first + "]");
    for (const auto &kv : sec.second)
      if (!it->second.count(kv.first))
        throw ConfigError("config: unknown key '" + kv.first + "' in section [" + sec.first + "]");
  }
}

bool IniConfig::has_section(const std::string &section) const { return tree_.find(section) != tree_.not_found(); }

bool IniConfig::has(const std::string &section, const std::string &key) const {
  const auto sec = tree_.find(section);
  if (sec == tree_.not_found())
    return false;
  return sec->second.find(key) != sec->second.not_found();
}

std::string IniConfig::get_string(const std::string &section, const std::string &key) const {
  if (!has(section, key))
    throw ConfigError("config: missing required key '" + key + "' in section [" + section + "]");
  return trim(tree_.get_child(section).get_child(key).data());
}

std::string IniConfig::get_string(const std::string &section, const std::string &key,
                                  const std::string &fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}

double IniConfig::get_double(const std::string &section, const std::string &key) const {
  return parse_number<double>(get_string(section, key), "[" + section + "] " + key);
}

double IniConfig::get_double(const std::string &section, const std::string &key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

std::int64_t IniConfig::get_int(const std::string &section, const std::string &key) const {
  return parse_number<std::int64_t>(get_string(section, key), "[" + section + "] " + key);
}

std::int64_t IniConfig::get_int(const std::string &section, const std::string &key, std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> IniConfig::get_list(const std::string &section, const std::string &key) const {
  return parse_csv_vector(get_string(section, key));
}

Norm<double> parse_norm(const std::string &raw, Eigen::Index d) {
  const std::string text = trim(raw);
  if (text == "linf")
    return Norm<double>::linf();
  if (text == "l2")
    return Norm<double>::lp(2.0);
  if (text.rfind("lp:", 0) == 0) {
    const std::string arg = text.substr(3);
    if (arg == "4logd")
      return Norm<double>::lp_log_dim(d);
    return Norm<double>::lp(parse_number<double>(arg, "norm '" + text + "'"));
  }
  if (text.rfind("weighted:", 0) == 0) {
    const std::vector<double> w = parse_csv_vector(text.substr(9));
    if (static_cast<Eigen::Index>(w.size()) != d)
      throw ConfigError("norm '" + text + "' has " + std::to_string(w.size()) + " weights, expected " +
                        std::to_string(d));
    return Norm<double>::weighted_l2(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
  }
  throw ConfigError("unknown norm '" + text + "' (expected linf, l2, lp:<p>, lp:4logd, weighted:<w,...>)");
}

} // namespace csa::harness
