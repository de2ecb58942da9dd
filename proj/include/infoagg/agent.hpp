#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "infoagg/lmsr.hpp"
#include "infoagg/types.hpp"

namespace infoagg {

// Everything a trader may see on its turn. Built by the engine from the
// transcript prefix; never carries another trader's private information.
struct AgentContext {
  std::string market_id;
  std::size_t trader = 0;
  std::size_t trader_count = 3;

  std::string question;
  std::string description;
  int round = 1;
  int total_rounds = 3;
  bool comments_allowed = false;
  Objective objective = Objective::Myopic;

  std::string public_info;
  std::string private_info;

  std::vector<Trade> trades;                // every turn so far, holds included
  std::vector<Comment> comments;            // oldest first
  std::vector<Reasoning> own_reasonings;    // this trader's earlier turns only

  Portfolio portfolio;
  MarketState market;
  ImpactPreview impact;
  InstrumentIds instruments;

  std::optional<std::string> disclosure;
};

struct AgentReply {
  std::optional<Decision> decision;  // empty: the engine records a Hold
  std::string note;
  std::string prompt;    // full prompt text, for agents that build one
  std::string response;  // raw model output, if any
};

class Agent {
public:
  virtual ~Agent() = default;
  virtual AgentReply decide(const AgentContext& ctx) = 0;
  virtual std::string kind() const = 0;
};

} // namespace infoagg
