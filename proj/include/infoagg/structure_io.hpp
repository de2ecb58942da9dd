#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "infoagg/knowledge.hpp"

namespace infoagg {

// Structure catalog file (JSON):
//   {
//     "name": "t3s111y2",
//     "preset": "Easy",                       optional
//     "signals": ["d_a", "d_b", "d_c"],
//     "states": ["a", ..., "h"],              optional; defaults to a, b, c, ...
//     "prior": [0.125, ...],                  optional; defaults to uniform
//     "payoff": [1, 1, 1, 0, 1, 0, 0, 0],
//     "true_state": "a",
//     "traders": [ {"cells": [["a","b","c","d"], ["e","f","g","h"]],
//                   "signals": ["d_a"]}, ... ]
//   }
// A document holding only {"preset": "<label or code>"} expands to that preset.
nlohmann::json structure_to_json(const InfoStructure& structure);
InfoStructure structure_from_json(const nlohmann::json& doc);

InfoStructure read_structure_file(const std::filesystem::path& path);
void write_structure_file(const std::filesystem::path& path, const InfoStructure& structure);

} // namespace infoagg
