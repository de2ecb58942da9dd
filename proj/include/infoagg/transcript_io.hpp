#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "infoagg/engine.hpp"

namespace infoagg {

nlohmann::json config_to_json(const MarketConfig& config);
MarketConfig config_from_json(const nlohmann::json& doc);

// One JSON object per line: a "market" header, one "turn" per round, and a
// closing "resolution" record.
std::string transcript_to_jsonl(const Transcript& t);
Transcript transcript_from_jsonl(const std::string& text);

// Prompts, decisions, executions and the resolution in reading order.
std::string transcript_to_text(const Transcript& t);

Transcript read_transcript(const std::filesystem::path& path);
// Writes <dir>/<market_id>.jsonl and <dir>/<market_id>.txt atomically.
void write_transcript(const std::filesystem::path& dir, const Transcript& t);

struct ReplayCheck {
  bool ok = true;
  std::string detail;
};

// Re-runs the recorded decisions through a fresh market and compares every
// execution, price and profit.
ReplayCheck replay_transcript(const Transcript& recorded, double tolerance = 1e-9);

} // namespace infoagg
