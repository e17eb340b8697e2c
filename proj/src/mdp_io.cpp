#include "csa/mdp_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csa/error.hpp"
#include "csa/io.hpp"

namespace csa {

namespace {

constexpr const char *kFormat = "contract-sa-mdp";

} // namespace

std::string mdp_to_json(const Mdp &mdp) {
  nlohmann::json j;
  j["format"] = kFormat;
  j["version"] = 1;
  j["n_states"] = mdp.n_states();
  j["n_actions"] = mdp.n_actions();
  j["beta"] = mdp.beta();
  nlohmann::json P = nlohmann::json::array();
  for (Eigen::Index a = 0; a < mdp.n_actions(); ++a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index s = 0; s < mdp.n_states(); ++s) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index t = 0; t < mdp.n_states(); ++t)
        row.push_back(mdp.transition(a)(s, t));
      rows.push_back(std::move(row));
    }
    P.push_back(std::move(rows));
  }
  j["transitions"] = std::move(P);
  nlohmann::json R = nlohmann::json::array();
  for (Eigen::Index s = 0; s < mdp.n_states(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index a = 0; a < mdp.n_actions(); ++a)
      row.push_back(mdp.rewards()(s, a));
    R.push_back(std::move(row));
  }
  j["rewards"] = std::move(R);
  return j.dump(1) + "\n";
}

Mdp mdp_from_json(const std::string &text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("mdp file: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != kFormat)
      throw ConfigError("mdp file: unexpected format tag");
    if (j.at("version").get<int>() != 1)
      throw ConfigError("mdp file: unsupported version");
    for (const auto &item : j.items()) {
      const std::string &k = item.key();
      if (k != "format" && k != "version" && k != "n_states" && k != "n_actions" && k != "beta" &&
          k != "transitions" && k != "rewards")
        throw ConfigError("mdp file: unknown key '" + k + "'");
    }
    const auto S = j.at("n_states").get<Eigen::Index>();
    const auto A = j.at("n_actions").get<Eigen::Index>();
    if (S < 1 || A < 1)
      throw ConfigError("mdp file: dimensions must be positive");
    const auto &P = j.at("transitions");
    if (!P.is_array() || static_cast<Eigen::Index>(P.size()) != A)
      throw ConfigError("mdp file: transitions must hold one matrix per action");
    std::vector<Eigen::MatrixXd> mats;
    for (Eigen::Index a = 0; a < A; ++a) {
      const auto &rows = P[static_cast<std::size_t>(a)];
      if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != S)
        throw ConfigError("mdp file: transition matrix has the wrong number of rows");
      Eigen::MatrixXd M(S, S);
      for (Eigen::Index s = 0; s < S; ++s) {
        const auto &row = rows[static_cast<std::size_t>(s)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != S)
          throw ConfigError("mdp file: transition row has the wrong length");
        for (Eigen::Index t = 0; t < S; ++t)
          M(s, t) = row[static_cast<std::size_t>(t)].get<double>();
      }
      mats.push_back(std::move(M));
    }
    const auto &Rj = j.at("rewards");
    if (!Rj.is_array() || static_cast<Eigen::Index>(Rj.size()) != S)
      throw ConfigError("mdp file: rewards must have one row per state");
    Eigen::MatrixXd R(S, A);
    for (Eigen::Index s = 0; s < S; ++s) {
      const auto &row = Rj[static_cast<std::size_t>(s)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != A)
        throw ConfigError("mdp file: reward row has the wrong length");
      for (Eigen::Index a = 0; a < A; ++a)
        R(s, a) = row[static_cast<std::size_t>(a)].get<double>();
    }
    return Mdp(std::move(mats), std::move(R), j.at("beta").get<double>());
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("mdp file: ") + e.what());
  }
}

void save_mdp(const Mdp &mdp, const std::filesystem::path &path) { write_file_atomic(path, mdp_to_json(mdp)); }

Mdp load_mdp(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open mdp file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return mdp_from_json(ss.str());
}

} // namespace csa
