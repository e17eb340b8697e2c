#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "csa/norms.hpp"

namespace csa::harness {

/// Flat INI file with sections. Every key must appear in the schema passed
/// to `check_schema`; anything else is a hard error.
class IniConfig {
public:
  static IniConfig from_file(const std::string &path);
  static IniConfig from_string(const std::string &text);

  using Schema = std::map<std::string, std::set<std::string>>;
  void check_schema(const Schema &schema) const;

  bool has_section(const std::string &section) const;
  bool has(const std::string &section, const std::string &key) const;

  std::string get_string(const std::string &section, const std::string &key) const;
  std::string get_string(const std::string &section, const std::string &key, const std::string &fallback) const;
  double get_double(const std::string &section, const std::string &key) const;
  double get_double(const std::string &section, const std::string &key, double fallback) const;
  std::int64_t get_int(const std::string &section, const std::string &key) const;
  std::int64_t get_int(const std::string &section, const std::string &key, std::int64_t fallback) const;
  std::vector<double> get_list(const std::string &section, const std::string &key) const;

  /// Canonical text used for provenance hashing.
  const std::string &text() const noexcept { return text_; }

private:
  boost::property_tree::ptree tree_;
  std::string text_;
};

/// linf, l2, lp:<p>, lp:4logd, weighted:w1,w2,...
Norm<double> parse_norm(const std::string &text, Eigen::Index d);

} // namespace csa::harness
