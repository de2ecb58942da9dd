#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <random>
#include <string>

#include "infoagg/agent.hpp"
#include "infoagg/knowledge.hpp"

namespace infoagg {

// Risk-neutral myopic trader that knows the structure and its own cell, and
// that every other trader is myopic too. Public knowledge is rebuilt from the
// observed price after every earlier turn by matching it to the nearest
// posterior the acting trader could have announced.
class MyopicOracleAgent final : public Agent {
public:
  MyopicOracleAgent(InfoStructure structure, std::size_t trader, double clamp = kTargetClamp);

  AgentReply decide(const AgentContext& ctx) override;
  std::string kind() const override { return "oracle"; }

  // Public event implied by the turns in `ctx`; throws KnowledgeError.
  PublicEvent public_event(const AgentContext& ctx) const;

private:
  InfoStructure structure_;
  std::size_t trader_;
  double clamp_;
};

// Uniformly random feasible action, side and size; a control population.
class NoiseAgent final : public Agent {
public:
  explicit NoiseAgent(std::uint64_t seed) : rng_(seed) {}

  AgentReply decide(const AgentContext& ctx) override;
  std::string kind() const override { return "noise"; }

private:
  std::mt19937_64 rng_;
};

class HoldAgent final : public Agent {
public:
  AgentReply decide(const AgentContext&) override { return AgentReply{Decision::hold(), {}, {}, {}}; }
  std::string kind() const override { return "hold"; }
};

// Plays back a fixed list of decisions, then holds.
class ScriptedAgent final : public Agent {
public:
  explicit ScriptedAgent(std::deque<Decision> decisions) : decisions_(std::move(decisions)) {}

  AgentReply decide(const AgentContext&) override;
  std::string kind() const override { return "scripted"; }

private:
  std::deque<Decision> decisions_;
};

} // namespace infoagg
