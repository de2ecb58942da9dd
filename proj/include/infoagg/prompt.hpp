#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infoagg/agent.hpp"
#include "infoagg/knowledge.hpp"

namespace infoagg {

std::string_view market_question();

// Public description of the structure (question, dimensions, payoff rule,
// who observes what). Preset texts match the experiment wording.
std::string public_information_text(const InfoStructure& structure);

// What `trader` privately learns at the structure's true state.
std::string private_information_text(const InfoStructure& structure, std::size_t trader);

std::string_view objective_text(Objective objective);

struct DisclosureInfo {
  std::size_t trader = 0;
  std::vector<std::optional<double>> intelligence;  // one per trader
  std::optional<int> complexity_level;              // 1..4 for presets
};

std::string disclosure_block(const DisclosureInfo& info);

// Display helpers shared with the transcript writer.
std::string format_money(double amount);            // "£534.84"
std::string format_price(double price, int digits); // "£1.000"

std::string build_prompt(const AgentContext& ctx);

} // namespace infoagg
