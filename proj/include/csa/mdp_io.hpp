#pragma once

#include <filesystem>
#include <string>

#include "csa/mdp.hpp"

namespace csa {

// JSON layout:
//   { "format": "contract-sa-mdp", "version": 1, "n_states": S, "n_actions": A,
//     "beta": b, "transitions": [[[..S..] x S] x A], "rewards": [[..A..] x S] }
// Doubles are written in shortest round-trip form, so save/load is exact.

std::string mdp_to_json(const Mdp &mdp);
Mdp mdp_from_json(const std::string &text);

void save_mdp(const Mdp &mdp, const std::filesystem::path &path);
Mdp load_mdp(const std::filesystem::path &path);

} // namespace csa
