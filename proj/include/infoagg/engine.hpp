#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "infoagg/agent.hpp"
#include "infoagg/knowledge.hpp"
#include "infoagg/lmsr.hpp"
#include "infoagg/types.hpp"

namespace infoagg {

struct MarketConfig {
  std::string market_id = "market";
  InfoStructure structure;
  int rounds = 3;
  double initial_price = 0.5;
  bool comments_allowed = false;
  Objective objective = Objective::Myopic;
  bool disclosure = false;
  double beta = kDefaultBeta;
  double starting_cash = 1000.0;
  std::uint64_t seed = 0;
  InstrumentIds instruments;
  std::string team;
  // Per-trader intelligence scores for the disclosure block.
  std::vector<std::optional<double>> intelligence;
  // Stamp turns with the wall clock instead of the logical clock.
  bool wall_clock = false;

  // Throws std::invalid_argument.
  void validate() const;
};

struct PromptRecord {
  int round = 0;
  std::size_t trader = 0;
  std::string prompt;
  std::string response;
};

struct Transcript {
  MarketConfig config;
  std::vector<Trade> trades;          // one per turn, holds included
  std::vector<Decision> decisions;    // as submitted, parallel to trades
  std::vector<Comment> comments;
  std::vector<Reasoning> reasonings;
  std::vector<PromptRecord> prompts;
  MarketState initial_state;
  MarketState final_state;
  double final_price = 0.0;
  double outcome = 0.0;               // payoff of one Yes share at the true state
  std::vector<Portfolio> portfolios;  // final holdings
  std::vector<double> profits;
  double conservation_residual = 0.0;
};

// Logical turn clock: fixed epoch plus 45 s per turn, "YYYY-MM-DD HH:MM:SS".
std::string logical_timestamp(int turn_index);
std::string wall_timestamp();

// Total trader profit predicted by the market state alone:
// payout of the net shares issued minus net cost collected by the maker.
double constant_sum_profit(const MarketState& initial, const MarketState& final_state,
                           double outcome);

// A live market: one writer, turns strictly in round-robin order.
class Market {
public:
  // open_market: offset shares for the opening price, equal cash, no holdings.
  explicit Market(MarketConfig config);

  const MarketConfig& config() const noexcept { return config_; }
  const MarketState& state() const noexcept { return state_; }
  const Portfolio& portfolio(std::size_t trader) const { return portfolios_.at(trader); }
  std::size_t trader_count() const noexcept { return portfolios_.size(); }

  int next_round() const noexcept { return static_cast<int>(transcript_.trades.size()) + 1; }
  std::size_t next_trader() const noexcept {
    return static_cast<std::size_t>(next_round() - 1) % trader_count();
  }
  bool finished() const noexcept { return next_round() > config_.rounds; }

  // The view handed to the trader whose turn it is.
  AgentContext context() const;

  // validate_and_execute: buys clamp to max_affordable, sells to holdings,
  // malformed decisions become holds with a note. Throws std::logic_error if
  // it is not `trader`'s turn or the market is finished.
  const Trade& execute(std::size_t trader, const Decision& decision, std::string note = {});

  void record_prompt(std::string prompt, std::string response);

  // resolve_market: per-trader profits marked to resolution.
  const std::vector<double>& resolve();
  bool resolved() const noexcept { return resolved_; }

  const Transcript& transcript() const noexcept { return transcript_; }

private:
  std::string stamp(int turn_index) const;

  MarketConfig config_;
  MarketState state_;
  std::vector<Portfolio> portfolios_;
  Transcript transcript_;
  bool resolved_ = false;
};

// Plays every round with agents[i] trading for trader i. Agent exceptions
// and missing decisions become holds; the market never aborts.
Transcript run_market(const MarketConfig& config, std::span<Agent* const> agents);
Transcript run_market(const MarketConfig& config,
                      const std::vector<std::unique_ptr<Agent>>& agents);

} // namespace infoagg
